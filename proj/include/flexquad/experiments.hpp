#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "flexquad/sim.hpp"

namespace flexquad {

/// Scenario skeleton shared by the maneuver experiments: nominal
/// vehicle, configuration B, calibrated deflection scale.
inline Scenario experiment_base(double rho_tpu, double deflection_scale) {
  Scenario s;
  s.arm_model.rho_tpu = rho_tpu;
  s.arm_model.scale = deflection_scale;
  s.sim.duration_s = 6.0;
  return s;
}

struct RollExperimentResult {
  std::vector<TraceRow> trace;
  double delta_alpha_max_deg = 0.0; ///< max of alpha1 - alpha3
  double eff_angle_max_deg = 0.0;   ///< max of phi + dalpha
  double kappa_value = 0.0;         ///< evaluated at the deflection peak
  bool any_invalid = false;
};

/// Signed pair quantities at one trace row.
inline double row_delta_alpha_deg(const TraceRow& r) {
  return r.alpha_deg[0] - r.alpha_deg[2];
}
inline double row_delta_thrust_pair(const TraceRow& r) {
  return (r.thrust_n[0] + r.thrust_n[1]) - (r.thrust_n[2] + r.thrust_n[3]);
}
inline double row_total_thrust(const TraceRow& r) {
  return r.thrust_n[0] + r.thrust_n[1] + r.thrust_n[2] + r.thrust_n[3];
}

inline RollExperimentResult analyze_roll_trace(
    const std::vector<TraceRow>& trace) {
  RollExperimentResult res;
  res.trace = trace;
  std::size_t peak = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double da = row_delta_alpha_deg(trace[i]);
    if (std::abs(da) > std::abs(res.delta_alpha_max_deg)) {
      res.delta_alpha_max_deg = da;
      peak = i;
    }
    const double eff = rad2deg(trace[i].attitude[0]) + da;
    res.eff_angle_max_deg = std::max(res.eff_angle_max_deg, eff);
    if (trace[i].valid_flag == 0) res.any_invalid = true;
  }
  if (!trace.empty()) {
    const TraceRow& r = trace[peak];
    const double phi = r.attitude[0];
    if (std::abs(phi) > 1e-3)
      res.kappa_value =
          kappa(std::abs(deg2rad(res.delta_alpha_max_deg)),
                std::abs(row_delta_thrust_pair(r)), std::abs(phi),
                row_total_thrust(r));
  }
  return res;
}

/**
 * Roll-step experiment: command a roll of phi_max from hover, hold, and
 * return, recording the deflection swing, the effective-angle peak and
 * the flexible-force ratio kappa.
 */
inline RollExperimentResult roll_experiment(double rho_tpu, double phi_max_deg,
                                            bool corrections,
                                            double deflection_scale = 7.0) {
  if (!(rho_tpu >= 4.0 && rho_tpu <= 12.0))
    throw DomainError("rho_tpu outside the modeled range [4, 12]");
  Scenario s = experiment_base(rho_tpu, deflection_scale);
  s.name = "roll_experiment";
  s.corrections = corrections;
  Event up;
  up.t = 0.5;
  up.type = Event::Type::AttitudeSetpoint;
  up.setpoint.phi_rad = deg2rad(phi_max_deg);
  Event down;
  down.t = 4.0;
  down.type = Event::Type::AttitudeSetpoint;
  s.events = {up, down};

  Simulator sim(s);
  const SimResult out = sim.run();
  auto res = analyze_roll_trace(out.trace);
  res.any_invalid = res.any_invalid || out.any_invalid;
  return res;
}

struct YawHoldResult {
  double max_abs_yaw_deg = 0.0;
  double mean_abs_tau_psi = 0.0;
  bool aborted = false;
  bool pass = false;
};

/// Threshold separating a held yaw from a lost one.
constexpr double kYawHoldLimitDeg = 10.0;

/**
 * Hover hold with one fatigued arm. The degraded arm deflects beyond
 * the controller's model, so holding position costs continuous yaw
 * correction; the run fails when yaw leaves the limit (or the vehicle
 * is lost outright).
 */
inline YawHoldResult yaw_hold_experiment(double rho_tpu,
                                         double deflection_scale,
                                         int degraded_arm_cycles,
                                         FrameConfiguration config =
                                             FrameConfiguration::B,
                                         double duration_s = 8.0) {
  Scenario s = experiment_base(rho_tpu, deflection_scale);
  s.name = "yaw_hold";
  s.configuration = config;
  s.degradation.bending_cycles = {degraded_arm_cycles, 0, 0, 0};
  s.sim.duration_s = duration_s;
  Event kick;
  kick.t = 1.0;
  kick.type = Event::Type::MomentImpulse;
  kick.axis = 2;
  kick.magnitude_nm = 0.02;
  kick.duration_s = 0.5;
  s.events = {kick};

  YawHoldResult res;
  Simulator sim(s);
  std::vector<TraceRow> trace;
  try {
    trace = sim.run().trace;
  } catch (const SimulationAbort&) {
    res.aborted = true;
    res.max_abs_yaw_deg = 180.0;
    res.pass = false;
    return res;
  }
  double tau_sum = 0.0;
  for (const auto& r : trace) {
    res.max_abs_yaw_deg =
        std::max(res.max_abs_yaw_deg, std::abs(rad2deg(r.attitude[2])));
    tau_sum += std::abs(r.tau_psi);
  }
  res.mean_abs_tau_psi = trace.empty() ? 0.0 : tau_sum / trace.size();
  res.pass = res.max_abs_yaw_deg <= kYawHoldLimitDeg;
  return res;
}

} // namespace flexquad
