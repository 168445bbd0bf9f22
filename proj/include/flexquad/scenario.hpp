#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexquad/arm_deflection.hpp"
#include "flexquad/controller.hpp"
#include "flexquad/dynamics.hpp"
#include "flexquad/endurance.hpp"
#include "flexquad/perch.hpp"
#include "flexquad/rotor_layout.hpp"

namespace flexquad {

struct Event {
  enum class Type { AttitudeSetpoint, MomentImpulse, LandingTrigger };
  double t = 0.0;
  Type type = Type::AttitudeSetpoint;

  AttitudeSetpoint setpoint{};   // AttitudeSetpoint
  int axis = 2;                  // MomentImpulse: 0 roll, 1 pitch, 2 yaw
  double magnitude_nm = 0.0;     // MomentImpulse
  double duration_s = 0.0;       // MomentImpulse
};

struct LandingConfig {
  PerchPlant plant{};
  int arm_count = 2;
  double target_pressure = kTargetContactPressure;
  double noise_sigma = 50.0;
  double throttle_fraction = 0.30;
  PidGains gains = default_landing_gains();
};

struct SimParams {
  double dt_physics_s = 1e-3;
  double dt_control_s = 4e-3;
  double duration_s = 5.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(duration_s > 0.0)) throw ConfigError("duration must be positive");
    if (!(dt_physics_s > 0.0) || !(dt_control_s > 0.0))
      throw ConfigError("time steps must be positive");
    const double ratio = dt_control_s / dt_physics_s;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0)
      throw ConfigError("dt_control must be an integer multiple of dt_physics");
  }
};

struct Scenario {
  std::string name = "scenario";
  VehicleParams vehicle{};
  FrameConfiguration configuration = FrameConfiguration::B;
  double arm_length_m = 0.2;
  double c_t = 1.225e-5;
  double c_q = 1.96e-7;
  double omega_sq_max = 7.2e5;
  ArmDeflectionModel arm_model{};
  FlightGains gains{};
  bool corrections = true;
  bool corrected_torque = false;
  DegradationState degradation{};
  std::vector<Event> events;
  std::optional<LandingConfig> landing;
  std::vector<EnduranceInput> endurance_inputs;
  BatterySpec flight_battery{1800.0, 4, 14.8};
  BatterySpec servo_battery{1200.0, 2, 7.4};
  double torque_to_current_ma_per_kgcm = 1800.0;
  SimParams sim{};

  RotorLayout layout() const {
    RotorLayout l = make_configuration(configuration, arm_length_m, c_t, c_q);
    l.omega_sq_max = omega_sq_max;
    return l;
  }

  void validate() const {
    vehicle.validate();
    arm_model.validate();
    sim.validate();
    layout().validate();
    if (landing) landing->plant.validate();
    for (const auto& e : events)
      if (e.t < 0.0) throw ConfigError("event time must be non-negative");
  }
};

namespace detail {

using nlohmann::json;

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

inline PidGains parse_pid(const json& j, const PidGains& fallback) {
  PidGains g = fallback;
  g.kp = field_or(j, "kp", g.kp);
  g.ki = field_or(j, "ki", g.ki);
  g.kd = field_or(j, "kd", g.kd);
  g.out_limit = field_or(j, "out_limit", g.out_limit);
  g.i_limit = field_or(j, "i_limit", g.i_limit);
  return g;
}

inline Scenario parse_scenario(const json& j) {
  Scenario s;
  s.name = field_or<std::string>(j, "name", "scenario");

  if (j.contains("vehicle")) {
    const json& v = j.at("vehicle");
    s.vehicle.mass_kg = field_or(v, "mass_kg", s.vehicle.mass_kg);
    if (v.contains("inertia")) {
      const auto i = v.at("inertia").get<std::vector<double>>();
      if (i.size() != 3) throw ConfigError("field 'inertia': need 3 entries");
      s.vehicle.inertia = {i[0], i[1], i[2]};
    }
    s.vehicle.gravity = field_or(v, "gravity", s.vehicle.gravity);

    if (v.contains("layout")) {
      const json& l = v.at("layout");
      const auto cfg = field_or<std::string>(l, "configuration", "B");
      if (cfg == "A") s.configuration = FrameConfiguration::A;
      else if (cfg == "B") s.configuration = FrameConfiguration::B;
      else throw ConfigError("field 'configuration': must be \"A\" or \"B\"");
      s.arm_length_m = field_or(l, "arm_length_m", s.arm_length_m);
      s.c_t = field_or(l, "c_t", s.c_t);
      s.c_q = field_or(l, "c_q", s.c_q);
      s.omega_sq_max = field_or(l, "omega_sq_max", s.omega_sq_max);
    }

    if (v.contains("arm_model")) {
      const json& a = v.at("arm_model");
      auto& m = s.arm_model;
      m.alpha0_deg = field_or(a, "alpha0_deg", m.alpha0_deg);
      m.a1 = field_or(a, "a1", m.a1);
      m.a2 = field_or(a, "a2", m.a2);
      m.b1 = field_or(a, "b1", m.b1);
      m.b2 = field_or(a, "b2", m.b2);
      m.rho_tpu = field_or(a, "rho_tpu", m.rho_tpu);
      m.c_p = field_or(a, "c_p", m.c_p);
      m.p0_w = field_or(a, "p0_w", m.p0_w);
      m.scale = field_or(a, "deflection_scale", m.scale);
      m.validity_limit_deg =
          field_or(a, "validity_limit_deg", m.validity_limit_deg);
    }
  }

  if (j.contains("controller")) {
    const json& c = j.at("controller");
    s.corrections = field_or(c, "corrections", s.corrections);
    s.corrected_torque = field_or(c, "corrected_torque", s.corrected_torque);
    auto& g = s.gains;
    g.angle_kp_roll = field_or(c, "angle_kp_roll", g.angle_kp_roll);
    g.angle_kp_pitch = field_or(c, "angle_kp_pitch", g.angle_kp_pitch);
    g.angle_kp_yaw = field_or(c, "angle_kp_yaw", g.angle_kp_yaw);
    g.rate_limit = field_or(c, "rate_limit", g.rate_limit);
    if (c.contains("rate_roll")) g.rate_roll = parse_pid(c.at("rate_roll"), g.rate_roll);
    if (c.contains("rate_pitch"))
      g.rate_pitch = parse_pid(c.at("rate_pitch"), g.rate_pitch);
    if (c.contains("rate_yaw")) g.rate_yaw = parse_pid(c.at("rate_yaw"), g.rate_yaw);
    if (c.contains("altitude")) g.altitude = parse_pid(c.at("altitude"), g.altitude);

    if (c.contains("degradation")) {
      const json& d = c.at("degradation");
      s.degradation.onset_cycles =
          field_or(d, "onset_cycles", s.degradation.onset_cycles);
      s.degradation.gain_per_cycle =
          field_or(d, "gain_per_cycle", s.degradation.gain_per_cycle);
      if (d.contains("bending_cycles")) {
        const auto cyc = d.at("bending_cycles").get<std::vector<int>>();
        if (cyc.size() != 4)
          throw ConfigError("field 'bending_cycles': need 4 entries");
        for (int i = 0; i < 4; ++i) s.degradation.bending_cycles[i] = cyc[i];
      }
    }
  }

  if (j.contains("events")) {
    for (const json& e : j.at("events")) {
      Event ev;
      ev.t = field_or(e, "t", 0.0);
      const auto type = field_or<std::string>(e, "type", "");
      if (type == "attitude_setpoint") {
        ev.type = Event::Type::AttitudeSetpoint;
        ev.setpoint.phi_rad = deg2rad(field_or(e, "phi_deg", 0.0));
        ev.setpoint.theta_rad = deg2rad(field_or(e, "theta_deg", 0.0));
        ev.setpoint.psi_rad = deg2rad(field_or(e, "psi_deg", 0.0));
        ev.setpoint.altitude_m = field_or(e, "altitude_m", 0.0);
      } else if (type == "moment_impulse") {
        ev.type = Event::Type::MomentImpulse;
        const auto axis = field_or<std::string>(e, "axis", "yaw");
        if (axis == "roll") ev.axis = 0;
        else if (axis == "pitch") ev.axis = 1;
        else if (axis == "yaw") ev.axis = 2;
        else throw ConfigError("field 'axis': roll|pitch|yaw");
        ev.magnitude_nm = field_or(e, "magnitude_nm", 0.0);
        ev.duration_s = field_or(e, "duration_s", 0.1);
      } else if (type == "landing_trigger") {
        ev.type = Event::Type::LandingTrigger;
      } else {
        throw ConfigError("field 'type': unknown event type '" + type + "'");
      }
      s.events.push_back(ev);
    }
  }

  if (j.contains("landing")) {
    const json& l = j.at("landing");
    LandingConfig lc;
    lc.plant.pipe_diameter_m =
        field_or(l, "pipe_diameter_m", lc.plant.pipe_diameter_m);
    lc.plant.rho_tpu = field_or(l, "rho_tpu", lc.plant.rho_tpu);
    lc.plant.contact_stiffness =
        field_or(l, "contact_stiffness", lc.plant.contact_stiffness);
    lc.plant.time_constant_s =
        field_or(l, "time_constant_s", lc.plant.time_constant_s);
    lc.plant.p_max = field_or(l, "p_max", lc.plant.p_max);
    lc.arm_count = field_or(l, "arm_count", lc.arm_count);
    lc.target_pressure = field_or(l, "target_pressure", lc.target_pressure);
    lc.noise_sigma = field_or(l, "noise_sigma", lc.noise_sigma);
    lc.throttle_fraction =
        field_or(l, "throttle_fraction", lc.throttle_fraction);
    if (l.contains("gains")) lc.gains = parse_pid(l.at("gains"), lc.gains);
    if (lc.arm_count != 2 && lc.arm_count != 4)
      throw ConfigError("field 'arm_count': perching uses 2 or 4 arms");
    s.landing = lc;
  }

  if (j.contains("endurance")) {
    const json& e = j.at("endurance");
    if (e.contains("flight_battery_mah"))
      s.flight_battery.capacity_mah = e.at("flight_battery_mah").get<double>();
    if (e.contains("servo_battery_mah"))
      s.servo_battery.capacity_mah = e.at("servo_battery_mah").get<double>();
    s.torque_to_current_ma_per_kgcm = field_or(
        e, "torque_to_current_ma_per_kgcm", s.torque_to_current_ma_per_kgcm);
    if (e.contains("rows")) {
      for (const json& r : e.at("rows")) {
        EnduranceInput in;
        in.rho_tpu = field_or(r, "rho_tpu", 0.0);
        if (r.contains("mean_current_ma"))
          in.mean_current_ma = r.at("mean_current_ma").get<double>();
        if (r.contains("steady_torque_kgcm"))
          in.steady_torque_kgcm = r.at("steady_torque_kgcm").get<double>();
        if (r.contains("specific_strength_knm_kg"))
          in.specific_strength_knm_kg =
              r.at("specific_strength_knm_kg").get<double>();
        s.endurance_inputs.push_back(in);
      }
    }
  }

  if (j.contains("sim")) {
    const json& p = j.at("sim");
    s.sim.dt_physics_s = field_or(p, "dt_physics_s", s.sim.dt_physics_s);
    s.sim.dt_control_s = field_or(p, "dt_control_s", s.sim.dt_control_s);
    s.sim.duration_s = field_or(p, "duration_s", s.sim.duration_s);
    s.sim.seed = field_or<std::uint64_t>(p, "seed", s.sim.seed);
  }

  s.validate();
  return s;
}

} // namespace detail

/// Loads and validates a scenario file. Parse and validation problems
/// surface as ConfigError with the offending field or source location.
inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("parse error in ") + path + ": " + e.what());
  }
  try {
    return detail::parse_scenario(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid scenario ") + path + ": " + e.what());
  }
}

/// Loads a scenario with one field overridden (sweep support). The
/// parameter is addressed in dotted form, e.g. "vehicle.arm_model.rho_tpu".
inline Scenario load_scenario_with_override(const std::string& path,
                                            const std::string& dotted_param,
                                            double value) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("parse error in ") + path + ": " + e.what());
  }
  std::string pointer = "/";
  for (char c : dotted_param) pointer += (c == '.') ? '/' : c;
  try {
    j[nlohmann::json::json_pointer(pointer)] = value;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot address parameter '" + dotted_param + "': " +
                      e.what());
  }
  try {
    return detail::parse_scenario(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid scenario ") + path + ": " + e.what());
  }
}

} // namespace flexquad
