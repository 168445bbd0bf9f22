#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "flexquad/arm_deflection.hpp"
#include "flexquad/dynamics.hpp"
#include "flexquad/mixer.hpp"
#include "flexquad/rotor_layout.hpp"

namespace flexquad {

namespace detail {

/// Tilt angles from the deflection model for the given squared speeds.
/// Throws ValidityError when any arm leaves the quasi-static region,
/// since the derivative analysis has no meaning there.
inline TiltAngles tilt_from_speeds(const RotorLayout& layout,
                                   const ArmDeflectionModel& model,
                                   const Vec4& omega_sq, double power_w) {
  TiltAngles tilt;
  for (int i = 0; i < 4; ++i) {
    const DeflectionResult r =
        evaluate_deflection(model, layout.c_t * omega_sq[i], power_w);
    if (!r.valid)
      throw ValidityError("deflection outside the quasi-static region");
    tilt.alpha_deg[i] = r.alpha_deg;
  }
  return tilt;
}

/// Moment induced purely by the arm flexibility: the wrench of the
/// tilted rotor set minus the wrench the same thrusts would produce on a
/// rigid frame. Drag torques cancel in the difference.
inline Vec3 flex_moment(const RotorLayout& layout, const TiltAngles& tilt,
                        const Vec4& omega_sq) {
  const BodyWrench tilted = rotor_body_wrench(layout, tilt, omega_sq);
  const BodyWrench rigid = rotor_body_wrench(layout, TiltAngles{}, omega_sq);
  return tilted.torque - rigid.torque;
}

/// Central finite difference of the flex moment about `axis` with
/// respect to a torque demand on that same axis, around a hover trim.
inline double flex_moment_derivative(const RotorLayout& layout,
                                     const ArmDeflectionModel& model,
                                     double hover_thrust_n, double delta_tau,
                                     int axis) {
  if (!(hover_thrust_n > 0.0))
    throw DomainError("hover thrust must be positive");
  if (!(delta_tau > 0.0)) throw DomainError("delta_tau must be positive");

  const double power = model.p0_w;
  const double omega_sq_hover = hover_thrust_n / layout.c_t;
  const Vec4 hover_speeds{omega_sq_hover, omega_sq_hover, omega_sq_hover,
                          omega_sq_hover};
  const TiltAngles trim_tilt =
      tilt_from_speeds(layout, model, hover_speeds, power);
  const MixerMatrix mixer = build_mixer(layout, trim_tilt);

  // f_z demand that reproduces the hover speeds exactly through this mixer.
  double f_z = 0.0;
  for (int i = 0; i < 4; ++i)
    f_z += mixer.m[MixerMatrix::kFz][i] * omega_sq_hover;

  const auto moment_at = [&](double tau) {
    Wrench4 demand{f_z, 0.0, 0.0, 0.0};
    if (axis == 0) demand.tau_phi = tau;
    else if (axis == 1) demand.tau_theta = tau;
    else demand.tau_psi = tau;
    // Unclamped response: saturation would corrupt the derivative.
    const AllocationResult alloc =
        allocate(mixer, demand, 0.0, layout.omega_sq_max);
    if (alloc.saturated)
      throw DomainError("delta_tau saturates the rotors at this trim");
    const TiltAngles tilt =
        tilt_from_speeds(layout, model, alloc.omega_sq, power);
    return flex_moment(layout, tilt, alloc.omega_sq)[axis];
  };

  return (moment_at(+delta_tau) - moment_at(-delta_tau)) / (2.0 * delta_tau);
}

} // namespace detail

/// Default finite-difference step: 1% of the torque the rotor set can
/// produce about the given axis.
inline double default_delta_tau(const RotorLayout& layout, int axis) {
  const double span = layout.omega_sq_max - layout.omega_sq_min;
  if (axis == 2) return 0.01 * 2.0 * layout.c_q * span;
  return 0.01 * 2.0 * layout.d_m * layout.c_t * span;
}

/**
 * Yaw stability derivative C_M_tau_psi = d(M_flex,z)/d(tau_psi) at a
 * hover trim. The sign decides whether the flexibility-induced yaw
 * moment opposes (<0, stable) or reinforces (>0, unstable) a yaw torque,
 * and it depends on the rotor spin configuration.
 */
inline double yaw_stability_derivative(const RotorLayout& layout,
                                       const ArmDeflectionModel& model,
                                       double hover_thrust_n,
                                       double delta_tau = 0.0) {
  if (delta_tau <= 0.0) delta_tau = default_delta_tau(layout, 2);
  return detail::flex_moment_derivative(layout, model, hover_thrust_n,
                                        delta_tau, 2);
}

/// Pitch and roll stability derivatives (C_M_tau_phi, C_M_tau_theta).
/// Both come out negative for either spin configuration: a deflected arm
/// loses vertical-thrust effectiveness, which always opposes the torque.
inline std::pair<double, double> pitch_roll_stability_derivatives(
    const RotorLayout& layout, const ArmDeflectionModel& model,
    double hover_thrust_n, double delta_tau = 0.0) {
  const double dphi =
      delta_tau > 0.0 ? delta_tau : default_delta_tau(layout, 0);
  const double dtheta =
      delta_tau > 0.0 ? delta_tau : default_delta_tau(layout, 1);
  const double c_phi = detail::flex_moment_derivative(layout, model,
                                                      hover_thrust_n, dphi, 0);
  const double c_theta = detail::flex_moment_derivative(
      layout, model, hover_thrust_n, dtheta, 1);
  return {c_phi, c_theta};
}

/// All three derivatives bundled.
inline StabilityDerivatives stability_derivatives(
    const RotorLayout& layout, const ArmDeflectionModel& model,
    double hover_thrust_n, double delta_tau = 0.0) {
  StabilityDerivatives s;
  const auto [c_phi, c_theta] =
      pitch_roll_stability_derivatives(layout, model, hover_thrust_n, delta_tau);
  s.c_m_tau_phi = c_phi;
  s.c_m_tau_theta = c_theta;
  s.c_m_tau_psi =
      yaw_stability_derivative(layout, model, hover_thrust_n, delta_tau);
  return s;
}

} // namespace flexquad
