#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "flexquad/error.hpp"
#include "flexquad/math.hpp"

namespace flexquad {

/// One trace sample at controller rate. Columns are frozen; landing
/// columns stay zero until the landing phase.
struct TraceRow {
  double time_s = 0.0;
  Vec3 position{};
  Vec3 velocity{};
  Vec3 attitude{};   ///< rad
  Vec3 body_rates{};
  std::array<double, 4> alpha_deg{};  ///< plant arm deflections
  std::array<double, 4> thrust_n{};
  double tau_phi = 0.0;
  double tau_theta = 0.0;
  double tau_psi = 0.0;
  int valid_flag = 1; ///< 0 when any arm left the quasi-static region
  std::array<double, 4> s{}; ///< normalized contact pressure per arm
  std::array<double, 4> u{}; ///< normalized servo force per arm
};

inline const char* trace_csv_header() {
  return "time_s,x,y,z,vx,vy,vz,phi,theta,psi,p,q,r,"
         "alpha1,alpha2,alpha3,alpha4,t1,t2,t3,t4,"
         "tau_phi,tau_theta,tau_psi,valid_flag,"
         "s1,s2,s3,s4,u1,u2,u3,u4";
}

namespace detail {

inline void append_num(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

} // namespace detail

inline std::string format_trace_row(const TraceRow& r) {
  std::string line;
  line.reserve(420);
  const double cols[] = {
      r.time_s,        r.position[0],   r.position[1],   r.position[2],
      r.velocity[0],   r.velocity[1],   r.velocity[2],   r.attitude[0],
      r.attitude[1],   r.attitude[2],   r.body_rates[0], r.body_rates[1],
      r.body_rates[2], r.alpha_deg[0],  r.alpha_deg[1],  r.alpha_deg[2],
      r.alpha_deg[3],  r.thrust_n[0],   r.thrust_n[1],   r.thrust_n[2],
      r.thrust_n[3],   r.tau_phi,       r.tau_theta,     r.tau_psi};
  for (double c : cols) {
    detail::append_num(line, c);
    line += ',';
  }
  line += std::to_string(r.valid_flag);
  for (double c : {r.s[0], r.s[1], r.s[2], r.s[3], r.u[0], r.u[1], r.u[2],
                   r.u[3]}) {
    line += ',';
    detail::append_num(line, c);
  }
  return line;
}

inline void write_trace_csv(const std::string& path,
                            const std::vector<TraceRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open trace output: " + path);
  out << trace_csv_header() << '\n';
  for (const auto& r : rows) out << format_trace_row(r) << '\n';
}

/// Summary as ordered metric/value pairs, written as a two-column CSV.
using Summary = std::vector<std::pair<std::string, double>>;

inline void write_summary_csv(const std::string& path, const Summary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open summary output: " + path);
  out << "metric,value\n";
  for (const auto& [k, v] : summary) {
    std::string line = k;
    line += ',';
    detail::append_num(line, v);
    out << line << '\n';
  }
}

/// Generic rectangular CSV (endurance tables, sweep aggregates).
inline void write_table_csv(const std::string& path,
                            const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open table output: " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << '\n';
  }
}

/// Reads a trace CSV back into rows (used to recompute summaries).
inline std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty trace: " + path);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 33> v{};
    std::size_t pos = 0;
    for (int i = 0; i < 33; ++i) {
      const std::size_t next = line.find(',', pos);
      v[i] = std::stod(line.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    TraceRow r;
    r.time_s = v[0];
    r.position = {v[1], v[2], v[3]};
    r.velocity = {v[4], v[5], v[6]};
    r.attitude = {v[7], v[8], v[9]};
    r.body_rates = {v[10], v[11], v[12]};
    r.alpha_deg = {v[13], v[14], v[15], v[16]};
    r.thrust_n = {v[17], v[18], v[19], v[20]};
    r.tau_phi = v[21];
    r.tau_theta = v[22];
    r.tau_psi = v[23];
    r.valid_flag = static_cast<int>(v[24]);
    r.s = {v[25], v[26], v[27], v[28]};
    r.u = {v[29], v[30], v[31], v[32]};
    rows.push_back(r);
  }
  return rows;
}

} // namespace flexquad
