#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "flexquad/arm_deflection.hpp"
#include "flexquad/dynamics.hpp"
#include "flexquad/pid.hpp"

namespace flexquad {

/// Gains for the cascaded attitude/altitude stack: P angle loops feeding
/// PID rate loops, plus a PID altitude loop producing vertical
/// acceleration demand.
struct FlightGains {
  double angle_kp_roll = 6.0;   ///< 1/s
  double angle_kp_pitch = 6.0;  ///< 1/s
  double angle_kp_yaw = 3.0;    ///< 1/s
  double rate_limit = 3.5;      ///< rad/s, angle-loop output clamp

  PidGains rate_roll{0.35, 0.25, 0.006, 2.5, 0.8};
  PidGains rate_pitch{0.35, 0.25, 0.006, 2.5, 0.8};
  PidGains rate_yaw{0.25, 0.15, 0.0, 0.6, 0.3};
  PidGains altitude{6.0, 1.5, 4.0, 8.0, 3.0};
};

struct AttitudeSetpoint {
  double phi_rad = 0.0;
  double theta_rad = 0.0;
  double psi_rad = 0.0;
  double altitude_m = 0.0;
};

/// Fatigue state of the printed arms. Repeated bending cycles beyond the
/// onset count leave fiber ruptures that make an arm deflect more than
/// the nominal model predicts, by a multiplicative gain.
struct DegradationState {
  std::array<int, 4> bending_cycles{0, 0, 0, 0};
  int onset_cycles = 50;
  double gain_per_cycle = 0.01;

  double deflection_gain(int arm_index) const {
    const int over = bending_cycles[arm_index] - onset_cycles;
    return over > 0 ? 1.0 + gain_per_cycle * over : 1.0;
  }
};

/// Deflection model an individual (possibly fatigued) arm actually obeys.
inline ArmDeflectionModel apply_degradation(const DegradationState& deg,
                                            const ArmDeflectionModel& model,
                                            int arm_index) {
  ArmDeflectionModel out = model;
  out.scale *= deg.deflection_gain(arm_index);
  return out;
}

/**
 * Cascaded PID flight controller.
 *
 * Produces the 4-component command (thrust plus three torques) from the
 * state and setpoint. Thrust combines hover feedforward with the
 * altitude loop and is tilted-frame compensated; torques come from the
 * rate loops fed by proportional angle loops.
 */
class FlightController {
public:
  FlightController(const FlightGains& gains, const VehicleParams& params)
      : gains_(gains), params_(params), rate_roll_(gains.rate_roll),
        rate_pitch_(gains.rate_pitch), rate_yaw_(gains.rate_yaw),
        altitude_(gains.altitude) {}

  void reset() {
    rate_roll_.reset();
    rate_pitch_.reset();
    rate_yaw_.reset();
    altitude_.reset();
  }

  Wrench4 attitude_step(const VehicleState& state,
                        const AttitudeSetpoint& setpoint, double dt) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");

    const double rate_sp_roll = std::clamp(
        gains_.angle_kp_roll * (setpoint.phi_rad - state.attitude[0]),
        -gains_.rate_limit, gains_.rate_limit);
    const double rate_sp_pitch = std::clamp(
        gains_.angle_kp_pitch * (setpoint.theta_rad - state.attitude[1]),
        -gains_.rate_limit, gains_.rate_limit);
    const double rate_sp_yaw = std::clamp(
        gains_.angle_kp_yaw * (setpoint.psi_rad - state.attitude[2]),
        -gains_.rate_limit, gains_.rate_limit);

    Wrench4 cmd;
    cmd.tau_phi = rate_roll_.step(rate_sp_roll, state.body_rates[0], dt);
    cmd.tau_theta = rate_pitch_.step(rate_sp_pitch, state.body_rates[1], dt);
    cmd.tau_psi = rate_yaw_.step(rate_sp_yaw, state.body_rates[2], dt);

    const double az_cmd =
        altitude_.step(setpoint.altitude_m, state.position[2], dt);
    const double tilt_comp = std::max(
        0.35, std::cos(state.attitude[0]) * std::cos(state.attitude[1]));
    cmd.f_z = std::max(
        0.0, params_.mass_kg * (params_.gravity + az_cmd) / tilt_comp);
    return cmd;
  }

private:
  FlightGains gains_;
  VehicleParams params_;
  Pid rate_roll_;
  Pid rate_pitch_;
  Pid rate_yaw_;
  Pid altitude_;
};

} // namespace flexquad
