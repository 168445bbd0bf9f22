#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flexquad/experiments.hpp"
#include "flexquad/sim.hpp"

namespace flexquad {

/**
 * Summary metrics as a pure function of the written traces (plus the
 * scenario constants needed to de-normalize the landing columns).
 */
inline Summary compute_summary(const std::vector<TraceRow>& trace,
                               const std::vector<TraceRow>& trace_alt,
                               const Scenario& scenario) {
  Summary summary;
  const auto roll = analyze_roll_trace(trace);
  summary.emplace_back("delta_alpha_max_deg", roll.delta_alpha_max_deg);
  summary.emplace_back("eff_angle_max_deg", roll.eff_angle_max_deg);
  summary.emplace_back("kappa", roll.kappa_value);
  summary.emplace_back("invalid_steps",
                       static_cast<double>(std::count_if(
                           trace.begin(), trace.end(),
                           [](const TraceRow& r) { return r.valid_flag == 0; })));

  double max_yaw = 0.0, tau_sum = 0.0;
  for (const auto& r : trace) {
    max_yaw = std::max(max_yaw, std::abs(rad2deg(r.attitude[2])));
    tau_sum += std::abs(r.tau_psi);
  }
  summary.emplace_back("max_abs_yaw_deg", max_yaw);
  summary.emplace_back("mean_abs_tau_psi",
                       trace.empty() ? 0.0 : tau_sum / trace.size());
  if (!trace.empty()) {
    const auto& last = trace.back();
    summary.emplace_back("xy_drift_final_m",
                         std::hypot(last.position[0], last.position[1]));
  }

  if (!trace_alt.empty()) {
    const auto alt = analyze_roll_trace(trace_alt);
    const auto& corrected = scenario.corrections ? roll : alt;
    const auto& uncorrected = scenario.corrections ? alt : roll;
    summary.emplace_back("eff_angle_max_corrected_deg",
                         corrected.eff_angle_max_deg);
    summary.emplace_back("eff_angle_max_uncorrected_deg",
                         uncorrected.eff_angle_max_deg);
    if (corrected.eff_angle_max_deg > 0.0)
      summary.emplace_back("eff_angle_ratio",
                           uncorrected.eff_angle_max_deg /
                               corrected.eff_angle_max_deg);
  }

  if (scenario.landing) {
    for (int arm = 0; arm < scenario.landing->arm_count; ++arm) {
      std::vector<PerchTracePoint> pts;
      double t0 = -1.0;
      for (const auto& r : trace) {
        if (r.u[arm] <= 0.0 && r.s[arm] <= 0.0 && t0 < 0.0) continue;
        if (t0 < 0.0) t0 = r.time_s;
        pts.push_back({r.time_s - t0 + scenario.sim.dt_control_s,
                       0.0,
                       r.s[arm] * scenario.landing->plant.p_max,
                       0.0,
                       r.u[arm] * 0.5 * kServoTorqueMax});
      }
      const ClosureMetrics m =
          closure_metrics(pts, scenario.landing->target_pressure);
      const std::string suffix = "_arm" + std::to_string(arm + 1);
      summary.emplace_back("closure_time_s" + suffix, m.closure_time_s);
      summary.emplace_back("steady_torque_kgcm" + suffix, m.steady_torque_kgcm);
    }
  }

  return summary;
}

struct RunOutputs {
  std::vector<TraceRow> trace;
  std::vector<TraceRow> trace_alt;
  Summary summary;
  std::filesystem::path trace_path;
  std::filesystem::path summary_path;
};

/**
 * Runs a scenario and writes its artifacts under out_dir: trace.csv,
 * summary.csv, trace_alt.csv (complementary corrections pass, produced
 * for maneuver scenarios so the corrected/uncorrected ratio is always
 * available) and endurance.csv when the scenario carries endurance
 * inputs. Deterministic for a fixed scenario and seed.
 */
inline RunOutputs run_scenario(const Scenario& scenario,
                               const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  RunOutputs out;
  Simulator sim(scenario);
  out.trace = sim.run().trace;

  const bool has_maneuver =
      std::any_of(scenario.events.begin(), scenario.events.end(),
                  [](const Event& e) {
                    return e.type == Event::Type::AttitudeSetpoint;
                  });
  if (has_maneuver) {
    Scenario flipped = scenario;
    flipped.corrections = !scenario.corrections;
    Simulator alt(flipped);
    out.trace_alt = alt.run().trace;
  }

  out.summary = compute_summary(out.trace, out.trace_alt, scenario);

  out.trace_path = out_dir / "trace.csv";
  write_trace_csv(out.trace_path.string(), out.trace);
  if (!out.trace_alt.empty())
    write_trace_csv((out_dir / "trace_alt.csv").string(), out.trace_alt);
  out.summary_path = out_dir / "summary.csv";
  write_summary_csv(out.summary_path.string(), out.summary);

  if (!scenario.endurance_inputs.empty()) {
    const auto reports = endurance_sweep(
        scenario.endurance_inputs, scenario.flight_battery,
        scenario.servo_battery, scenario.torque_to_current_ma_per_kgcm);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
      auto fmt = [](const std::optional<double>& v) {
        if (!v) return std::string("");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.12g", *v);
        return std::string(buf);
      };
      char rho[32];
      std::snprintf(rho, sizeof(rho), "%.12g", r.rho_tpu);
      rows.push_back({rho, fmt(r.flight_time_min), fmt(r.inspection_time_min),
                      fmt(r.specific_strength_knm_kg),
                      r.error.empty() ? "" : r.error});
    }
    write_table_csv((out_dir / "endurance.csv").string(),
                    {"rho_tpu", "flight_time_min", "inspection_time_min",
                     "specific_strength_knm_kg", "error"},
                    rows);
  }

  return out;
}

struct SweepEntry {
  double value = 0.0;
  Summary summary;
  std::string error; ///< empty on success
};

/**
 * One run per parameter value, fixed seeds, aggregated and sorted by the
 * parameter. A failed run is recorded with its error and the sweep
 * continues.
 */
inline std::vector<SweepEntry> sweep_scenario(
    const std::string& scenario_path, const std::string& dotted_param,
    std::vector<double> values, const std::filesystem::path& out_dir) {
  std::sort(values.begin(), values.end());
  std::vector<SweepEntry> entries;
  for (double v : values) {
    SweepEntry entry;
    entry.value = v;
    try {
      const Scenario sc =
          load_scenario_with_override(scenario_path, dotted_param, v);
      char sub[64];
      std::snprintf(sub, sizeof(sub), "value_%g", v);
      entry.summary = run_scenario(sc, out_dir / sub).summary;
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }

  std::vector<std::string> header{dotted_param};
  std::vector<std::vector<std::string>> rows;
  if (!entries.empty()) {
    for (const auto& e : entries)
      if (e.error.empty()) {
        for (const auto& [k, _] : e.summary) header.push_back(k);
        break;
      }
    header.push_back("error");
    for (const auto& e : entries) {
      std::vector<std::string> row;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12g", e.value);
      row.push_back(buf);
      for (std::size_t i = 1; i + 1 < header.size(); ++i) {
        std::string cell;
        for (const auto& [k, v] : e.summary)
          if (k == header[i]) {
            std::snprintf(buf, sizeof(buf), "%.12g", v);
            cell = buf;
            break;
          }
        row.push_back(cell);
      }
      row.push_back(e.error);
      rows.push_back(std::move(row));
    }
  }
  std::filesystem::create_directories(out_dir);
  write_table_csv((out_dir / "sweep.csv").string(), header, rows);
  return entries;
}

} // namespace flexquad
