#pragma once

#include <cmath>

#include "flexquad/error.hpp"

namespace flexquad {

/**
 * Quasi-static arm deflection model.
 *
 * The printed TPU arm bends upward under rotor thrust. The deflection
 * angle follows a quadratic in thrust whose coefficients depend on the
 * infill rate rho_tpu, with a battery power-loss factor:
 *
 *   alpha = alpha0 + [ (a1 + rho*a2)*T + (b1 + rho*b2)*T^2 ] * (P/P0)^c_p
 *
 * Angles are in degrees, thrust in newtons, power in watts. The model is
 * only meaningful while |alpha| stays below ~40 deg; beyond that the arm
 * enters a non-linear elastic regime and the quasi-static assumption
 * breaks down.
 *
 * `scale` is a calibration factor on the thrust-induced term. The stock
 * coefficients underpredict the deflections observed on the flight
 * vehicle at nominal thrust, so scenario configs carry a calibrated
 * scale instead of baking a guess into the coefficients.
 */
struct ArmDeflectionModel {
  double alpha0_deg = 0.0; ///< rest deflection, deg
  double a1 = 2.4387;      ///< deg/N
  double a2 = -0.1997;     ///< deg/N per % infill
  double b1 = -0.162;      ///< deg/N^2
  double b2 = 0.0151;      ///< deg/N^2 per % infill
  double rho_tpu = 6.9;    ///< infill rate, percent
  double c_p = 1.7;        ///< power-loss exponent, in [1.6, 1.8]
  double p0_w = 100.0;     ///< reference battery power, W
  double scale = 1.0;      ///< calibration factor on the thrust term
  double validity_limit_deg = 40.0;

  double linear_coeff() const { return a1 + rho_tpu * a2; }
  double quadratic_coeff() const { return b1 + rho_tpu * b2; }

  void validate() const {
    if (!(rho_tpu > 0.0 && rho_tpu <= 100.0))
      throw DomainError("rho_tpu must be in (0, 100]");
    if (!(c_p >= 1.6 && c_p <= 1.8))
      throw DomainError("c_p must lie in [1.6, 1.8]");
    if (!(p0_w > 0.0)) throw DomainError("p0 must be positive");
    if (!(scale > 0.0)) throw DomainError("scale must be positive");
  }
};

struct DeflectionResult {
  double alpha_deg = 0.0;
  bool valid = true; ///< |alpha| within the quasi-static limit
};

/// Deflection angle for a given thrust and available battery power.
inline DeflectionResult evaluate_deflection(const ArmDeflectionModel& model,
                                            double thrust_n, double power_w) {
  if (!std::isfinite(thrust_n) || !std::isfinite(power_w))
    throw DomainError("non-finite deflection input");
  if (thrust_n < 0.0) throw DomainError("thrust must be non-negative");
  if (power_w <= 0.0) throw DomainError("power must be positive");

  const double power_factor = std::pow(power_w / model.p0_w, model.c_p);
  const double bracket = model.linear_coeff() * thrust_n +
                         model.quadratic_coeff() * thrust_n * thrust_n;
  const double alpha =
      model.alpha0_deg + model.scale * bracket * power_factor;
  return {alpha, std::abs(alpha) <= model.validity_limit_deg};
}

/**
 * Thrust that produces a target deflection angle at the given power.
 *
 * Inverts the quadratic and returns the smallest non-negative real root,
 * since thrust grows from zero. Throws UnreachableDeflectionError when no
 * such root exists (target beyond the vertex of the quadratic, or of the
 * wrong sign for the coefficients).
 */
inline double invert_deflection(const ArmDeflectionModel& model,
                                double alpha_target_deg, double power_w) {
  if (!std::isfinite(alpha_target_deg) || !std::isfinite(power_w))
    throw DomainError("non-finite deflection input");
  if (power_w <= 0.0) throw DomainError("power must be positive");

  const double power_factor = std::pow(power_w / model.p0_w, model.c_p);
  // Solve b T^2 + a T - rhs = 0 with the calibrated coefficients.
  const double a = model.linear_coeff() * model.scale * power_factor;
  const double b = model.quadratic_coeff() * model.scale * power_factor;
  const double rhs = alpha_target_deg - model.alpha0_deg;

  if (rhs == 0.0) return 0.0;

  if (std::abs(b) < 1e-15) {
    if (std::abs(a) < 1e-15)
      throw UnreachableDeflectionError("degenerate deflection model");
    const double t = rhs / a;
    if (t < 0.0)
      throw UnreachableDeflectionError("target requires negative thrust");
    return t;
  }

  const double disc = a * a + 4.0 * b * rhs;
  if (disc < 0.0)
    throw UnreachableDeflectionError("target beyond achievable deflection");
  const double sq = std::sqrt(disc);
  const double r1 = (-a + sq) / (2.0 * b);
  const double r2 = (-a - sq) / (2.0 * b);
  const double lo = std::min(r1, r2);
  const double hi = std::max(r1, r2);
  double root = -1.0;
  if (lo >= 0.0) root = lo;
  else if (hi >= 0.0) root = hi;
  if (root < 0.0)
    throw UnreachableDeflectionError("no non-negative thrust root");
  return root;
}

/// Deflection difference between a high- and a low-thrust arm.
inline double deflection_delta(const ArmDeflectionModel& model, double t_high_n,
                               double t_low_n, double power_w) {
  return evaluate_deflection(model, t_high_n, power_w).alpha_deg -
         evaluate_deflection(model, t_low_n, power_w).alpha_deg;
}

} // namespace flexquad
