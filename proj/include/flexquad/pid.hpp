#pragma once

#include <algorithm>
#include <cmath>

#include "flexquad/error.hpp"

namespace flexquad {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double out_limit = 1.0; ///< symmetric output clamp, > 0
  double i_limit = 1.0;   ///< integrator state clamp, > 0

  void validate() const {
    if (!(out_limit > 0.0) || !(i_limit > 0.0))
      throw DomainError("pid limits must be positive");
    if (kp < 0.0 || ki < 0.0 || kd < 0.0)
      throw DomainError("pid gains must be non-negative");
  }
};

/**
 * PID with derivative on measurement and clamped integrator.
 *
 * Derivative acts on the measurement rather than the error so setpoint
 * steps do not kick the output. Integration is skipped while the output
 * is saturated in the direction of the error.
 */
class Pid {
public:
  Pid() = default;
  explicit Pid(const PidGains& gains) : gains_(gains) { gains_.validate(); }

  void set_gains(const PidGains& gains) {
    gains_ = gains;
    gains_.validate();
  }
  const PidGains& gains() const { return gains_; }

  void reset() {
    integrator_ = 0.0;
    prev_measurement_ = 0.0;
    has_prev_ = false;
  }

  double step(double setpoint, double measurement, double dt) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    const double error = setpoint - measurement;

    double derivative = 0.0;
    if (has_prev_ && gains_.kd > 0.0)
      derivative = -(measurement - prev_measurement_) / dt;
    prev_measurement_ = measurement;
    has_prev_ = true;

    const double unsat = gains_.kp * error + integrator_ + gains_.kd * derivative;
    const bool saturating = (unsat > gains_.out_limit && error > 0.0) ||
                            (unsat < -gains_.out_limit && error < 0.0);
    if (!saturating) {
      integrator_ = std::clamp(integrator_ + gains_.ki * error * dt,
                               -gains_.i_limit, gains_.i_limit);
    }

    const double out = gains_.kp * error + integrator_ + gains_.kd * derivative;
    return std::clamp(out, -gains_.out_limit, gains_.out_limit);
  }

  double integrator() const { return integrator_; }

private:
  PidGains gains_{};
  double integrator_ = 0.0;
  double prev_measurement_ = 0.0;
  bool has_prev_ = false;
};

} // namespace flexquad
