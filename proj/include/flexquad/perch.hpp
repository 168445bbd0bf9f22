#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "flexquad/error.hpp"
#include "flexquad/pid.hpp"

namespace flexquad {

constexpr double kServoTorqueMax = 25.0; ///< kg.cm
constexpr double kTargetContactPressure = 950.0; ///< N/m^2

/**
 * Tendon-closure plant for one arm against a pipe.
 *
 * The servo winds the tendon against the arm's elastic resistance; the
 * winding angle follows a first-order response whose speed is set by the
 * tendon damping and whose steady value is torque over arm stiffness.
 * Contact pressure develops once the winding passes the contact angle
 * for the pipe diameter:
 *
 *   theta_ss = u / k_arm(rho)            k_arm grows with infill rate
 *   pressure = c * max(0, theta - theta_contact(D))
 *
 * Smaller pipes need more winding travel before contact; stiffer (higher
 * infill) arms need more steady torque to hold a given pressure. Both
 * trends match the bench behavior the constants were calibrated against.
 */
struct PerchPlant {
  double pipe_diameter_m = 0.25;
  double rho_tpu = 6.0;
  double contact_stiffness = 40.0; ///< N/m^2 per deg of over-closure
  double time_constant_s = 13.0;   ///< first-order response at rho_ref
  double p_max = 1900.0;           ///< normalization for s(t) = P/p_max

  double rho_ref = 6.0;
  double stiffness_ref = 0.0731;   ///< kg.cm per deg, arm stiffness at rho_ref
  double contact_angle_ref_deg = 30.0; ///< winding to first contact at d_ref
  double d_ref_m = 0.25;

  void validate() const {
    for (double v : {pipe_diameter_m, rho_tpu, contact_stiffness,
                     time_constant_s, p_max, rho_ref, stiffness_ref,
                     contact_angle_ref_deg, d_ref_m})
      if (!(v > 0.0)) throw DomainError("perch plant fields must be positive");
  }

  double arm_stiffness() const {
    return stiffness_ref * (rho_tpu / rho_ref);
  }
  double contact_angle_deg() const {
    return contact_angle_ref_deg * (d_ref_m / pipe_diameter_m);
  }
  /// Tendon damping, kg.cm per (deg/s); infill-independent.
  double damping() const { return time_constant_s * stiffness_ref; }

  double pressure_at(double winding_deg) const {
    return contact_stiffness *
           std::max(0.0, winding_deg - contact_angle_deg());
  }
  /// Steady servo torque required to hold a contact pressure.
  double steady_torque_for(double pressure) const {
    return arm_stiffness() *
           (contact_angle_deg() + pressure / contact_stiffness);
  }
};

struct PerchCommand {
  double servo_torque_kgcm = 0.0;   ///< clamped to [0, 25]
  double throttle_fraction = 0.30;  ///< rotors stay on during landing

  void validate() const {
    if (servo_torque_kgcm < 0.0 || servo_torque_kgcm > kServoTorqueMax)
      throw DomainError("servo torque outside [0, 25] kg.cm");
    if (throttle_fraction < 0.0 || throttle_fraction > 1.0)
      throw DomainError("throttle outside [0, 1]");
  }
};

struct FsrReading {
  double pressure = 0.0;     ///< N/m^2, non-negative
  double noise_sigma = 50.0; ///< N/m^2
};

struct PerchStepResult {
  double winding_deg = 0.0;
  double pressure = 0.0; ///< true contact pressure, N/m^2
};

/// Advances the winding state one step under the commanded torque and
/// returns the true contact pressure.
inline PerchStepResult plant_step(const PerchPlant& plant, double winding_deg,
                                  const PerchCommand& command, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  command.validate();
  const double rate =
      (command.servo_torque_kgcm - plant.arm_stiffness() * winding_deg) /
      plant.damping();
  double next = winding_deg + rate * dt;
  if (next < 0.0) next = 0.0; // tendon cannot push the arm open
  return {next, plant.pressure_at(next)};
}

/// One noisy FSR sample: Gaussian error, clamped at zero.
inline FsrReading fsr_sample(double true_pressure, double noise_sigma,
                             std::mt19937_64& rng) {
  if (true_pressure < 0.0) throw DomainError("pressure must be non-negative");
  if (noise_sigma < 0.0) throw DomainError("noise sigma must be non-negative");
  double p = true_pressure;
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    p += noise(rng);
  }
  return {std::max(0.0, p), noise_sigma};
}

/// Seeded convenience overload.
inline FsrReading fsr_sample(double true_pressure, double noise_sigma,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return fsr_sample(true_pressure, noise_sigma, rng);
}

/// One PID update of the servo torque from a pressure reading. Output is
/// clamped to the allowable servo range.
inline PerchCommand landing_pid_step(double target_pressure,
                                     const FsrReading& reading, Pid& pid,
                                     double dt) {
  const double out = pid.step(target_pressure, reading.pressure, dt);
  PerchCommand cmd;
  cmd.servo_torque_kgcm = std::clamp(out, 0.0, kServoTorqueMax);
  return cmd;
}

struct PerchTracePoint {
  double t = 0.0;
  double winding_deg = 0.0;
  double pressure = 0.0;       ///< true pressure
  double reading = 0.0;        ///< noisy FSR value fed to the PID
  double command_kgcm = 0.0;
};

struct ClosureMetrics {
  double closure_time_s = 0.0;
  double steady_torque_kgcm = 0.0;
};

/// Default landing loop gains, tuned against the bench-calibrated plant.
inline PidGains default_landing_gains() {
  return PidGains{0.018, 0.06, 0.010, kServoTorqueMax, 15.0};
}

/// Runs the closed-loop landing for one arm.
inline std::vector<PerchTracePoint> run_landing(const PerchPlant& plant,
                                                const PidGains& gains,
                                                double target_pressure,
                                                double noise_sigma,
                                                double duration_s, double dt,
                                                std::mt19937_64& rng) {
  plant.validate();
  Pid pid(gains);
  std::vector<PerchTracePoint> trace;
  trace.reserve(static_cast<std::size_t>(duration_s / dt) + 1);

  double winding = 0.0;
  double pressure = 0.0;
  PerchCommand cmd;
  for (double t = 0.0; t < duration_s; t += dt) {
    const FsrReading reading = fsr_sample(pressure, noise_sigma, rng);
    cmd = landing_pid_step(target_pressure, reading, pid, dt);
    const PerchStepResult res = plant_step(plant, winding, cmd, dt);
    winding = res.winding_deg;
    pressure = res.pressure;
    trace.push_back({t + dt, winding, pressure, reading.pressure,
                     cmd.servo_torque_kgcm});
  }
  return trace;
}

/**
 * Closure time and steady servo torque from a landing trace.
 *
 * Closure time is the first instant after which the true pressure stays
 * within +/-5% of the target for the rest of the trace; the steady
 * torque is the mean command over the final 20%. Throws
 * NoConvergenceError when the trace never settles.
 */
inline ClosureMetrics closure_metrics(const std::vector<PerchTracePoint>& trace,
                                      double target_pressure =
                                          kTargetContactPressure) {
  if (trace.empty()) throw NoConvergenceError("empty landing trace");
  const double band = 0.05 * target_pressure;

  std::size_t settle = trace.size();
  for (std::size_t i = trace.size(); i-- > 0;) {
    if (std::abs(trace[i].pressure - target_pressure) <= band)
      settle = i;
    else
      break;
  }
  if (settle == trace.size())
    throw NoConvergenceError("pressure never settled into the target band");

  const std::size_t tail_start = trace.size() - trace.size() / 5;
  double sum = 0.0;
  for (std::size_t i = tail_start; i < trace.size(); ++i)
    sum += trace[i].command_kgcm;
  const double steady = sum / static_cast<double>(trace.size() - tail_start);

  return {trace[settle].t, steady};
}

} // namespace flexquad
