#pragma once

#include <array>
#include <cmath>

#include "flexquad/error.hpp"
#include "flexquad/math.hpp"

namespace flexquad {

enum class SpinDirection { CW, CCW };

/// Signed rotor angular velocity about body z. The CW/CCW labels follow
/// the airframe drawing (props viewed from below with z up), so a rotor
/// labeled CW spins positively about body z.
inline int spin_sign(SpinDirection s) {
  return s == SpinDirection::CW ? +1 : -1;
}

enum class FrameConfiguration { A, B };

/**
 * One rotor of the H layout.
 *
 * Body frame: z up, x the roll axis, y the pitch axis. The flexible arms
 * run along +/-y, so an arm bending up tilts its thrust vector along -/+y
 * (inboard). `mount_yaw_deg` is 0 for the +y arm pair and 180 for the -y
 * pair, which fixes the sign of that lateral component.
 */
struct Rotor {
  double x_m = 0.0;
  double y_m = 0.0;
  double z_m = 0.08; ///< rotor plane height above the center of mass
  SpinDirection spin = SpinDirection::CCW;
  double mount_yaw_deg = 0.0; ///< 0 = arm along +y, 180 = arm along -y

  /// +1 when the arm points along +y, -1 along -y.
  int arm_side() const { return std::cos(deg2rad(mount_yaw_deg)) >= 0.0 ? +1 : -1; }
};

/**
 * Rotor geometry and coefficients for the 4-rotor H frame.
 *
 * Rotor numbering follows the mixer column order: rotors 1 and 2 sit on
 * the +y arm pair (left/right), rotors 3 and 4 on the -y pair. `d_m` is
 * the single moment arm used by the mixer torque rows; the stock layout
 * is square so the same d serves roll and pitch.
 */
struct RotorLayout {
  std::array<Rotor, 4> rotors{};
  double c_t = 1.225e-5; ///< thrust coefficient, N/(rad/s)^2
  double c_q = 1.96e-7;  ///< drag-torque coefficient, N.m/(rad/s)^2
  double d_m = 0.2;      ///< mixer moment arm, m
  double omega_sq_min = 0.0;    ///< actuator floor, (rad/s)^2
  double omega_sq_max = 7.2e5;  ///< actuator ceiling, (rad/s)^2

  void validate() const {
    if (!(c_t > 0.0)) throw DomainError("c_t must be positive");
    if (!(c_q > 0.0)) throw DomainError("c_q must be positive");
    if (!(d_m > 0.0)) throw DomainError("arm length must be positive");
    if (!(omega_sq_min >= 0.0 && omega_sq_min < omega_sq_max))
      throw DomainError("invalid rotor speed limits");
    int cw = 0, plus_side = 0;
    for (const auto& r : rotors) {
      if (r.x_m == 0.0 && r.y_m == 0.0)
        throw DomainError("rotor position must be nonzero");
      if (r.spin == SpinDirection::CW) ++cw;
      if (r.arm_side() > 0) ++plus_side;
    }
    if (cw != 2) throw DomainError("layout needs exactly 2 CW and 2 CCW rotors");
    if (plus_side != 2)
      throw DomainError("layout needs two arms on each side of the frame");
  }
};

/**
 * Builds one of the two spin-direction configurations on a square H
 * layout with half-spacing `arm_length_m`.
 *
 * Configuration A: rotors 1 & 4 CW, rotors 2 & 3 CCW.
 * Configuration B: rotors 1 & 4 CCW, rotors 2 & 3 CW.
 *
 * The two differ only by a global spin flip; only one of them yields a
 * negative yaw stability derivative once arm flexibility is accounted
 * for.
 */
inline RotorLayout make_configuration(FrameConfiguration which,
                                      double arm_length_m, double c_t,
                                      double c_q,
                                      double rotor_height_m = 0.08) {
  if (!(arm_length_m > 0.0)) throw DomainError("arm length must be positive");
  const double d = arm_length_m;
  const double h = rotor_height_m;
  const bool a = which == FrameConfiguration::A;
  const SpinDirection outer = a ? SpinDirection::CW : SpinDirection::CCW;
  const SpinDirection inner = a ? SpinDirection::CCW : SpinDirection::CW;

  RotorLayout layout;
  layout.c_t = c_t;
  layout.c_q = c_q;
  layout.d_m = d;
  layout.rotors[0] = {-d, +d, h, outer, 0.0};   // rotor 1
  layout.rotors[1] = {+d, +d, h, inner, 0.0};   // rotor 2
  layout.rotors[2] = {-d, -d, h, inner, 180.0}; // rotor 3
  layout.rotors[3] = {+d, -d, h, outer, 180.0}; // rotor 4
  layout.validate();
  return layout;
}

} // namespace flexquad
