#pragma once

#include <array>
#include <cmath>

#include "flexquad/arm_deflection.hpp"
#include "flexquad/math.hpp"
#include "flexquad/rotor_layout.hpp"

namespace flexquad {

/// Per-arm deflection angles, degrees. Positive when the arm is up.
struct TiltAngles {
  std::array<double, 4> alpha_deg{0.0, 0.0, 0.0, 0.0};
};

/// Controlled wrench components: vertical force plus the three torques.
/// The lateral force f_x is a by-product of the tilt, not a control input.
struct Wrench4 {
  double f_z = 0.0;      ///< N
  double tau_phi = 0.0;  ///< N.m
  double tau_theta = 0.0; ///< N.m
  double tau_psi = 0.0;  ///< N.m
};

/**
 * 6x4 map from squared rotor speeds to body wrench
 * [f_x, f_y, f_z, tau_phi, tau_theta, tau_psi].
 *
 * Rows follow the flexible H-quad form: the f_x row carries the tilted
 * thrust components -s(a1) -s(a2) +s(a3) +s(a4) (times C_T), f_y is
 * identically zero, f_z carries c(a_i) C_T, and the torque rows are the
 * standard +/- d C_T and +/- C_Q factors, unmodified by tilt.
 */
struct MixerMatrix {
  std::array<std::array<double, 4>, 6> m{};

  static constexpr int kFx = 0;
  static constexpr int kFy = 1;
  static constexpr int kFz = 2;
  static constexpr int kTauPhi = 3;
  static constexpr int kTauTheta = 4;
  static constexpr int kTauPsi = 5;

  /// Full 6-component wrench for the given squared speeds.
  std::array<double, 6> apply(const Vec4& omega_sq) const {
    std::array<double, 6> w{};
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 4; ++c) w[r] += m[r][c] * omega_sq[c];
    return w;
  }

  /// The controlled 4-row subsystem (f_z and the three torques).
  Wrench4 apply_controlled(const Vec4& omega_sq) const {
    const auto w = apply(omega_sq);
    return {w[kFz], w[kTauPhi], w[kTauTheta], w[kTauPsi]};
  }
};

/**
 * Builds the mixer for the current arm deflections.
 *
 * With all angles zero this reduces exactly to the rigid H-quad mixer.
 * `corrected_torque` additionally applies the c(a_i) factor to the roll
 * and pitch rows for sensitivity studies; the stock form leaves the
 * torque rows untouched by tilt.
 */
inline MixerMatrix build_mixer(const RotorLayout& layout,
                               const TiltAngles& tilt,
                               bool corrected_torque = false) {
  MixerMatrix mixer;
  for (int i = 0; i < 4; ++i) {
    const Rotor& rotor = layout.rotors[i];
    const double alpha = deg2rad(tilt.alpha_deg[i]);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    const int side = rotor.arm_side();
    const double torque_scale = corrected_torque ? ca : 1.0;

    mixer.m[MixerMatrix::kFx][i] = -side * sa * layout.c_t;
    mixer.m[MixerMatrix::kFy][i] = 0.0;
    mixer.m[MixerMatrix::kFz][i] = ca * layout.c_t;
    mixer.m[MixerMatrix::kTauPhi][i] =
        side * layout.d_m * layout.c_t * torque_scale;
    mixer.m[MixerMatrix::kTauTheta][i] =
        (rotor.x_m < 0.0 ? +1.0 : -1.0) * layout.d_m * layout.c_t *
        torque_scale;
    mixer.m[MixerMatrix::kTauPsi][i] = -spin_sign(rotor.spin) * layout.c_q;
  }
  return mixer;
}

struct AllocationResult {
  Vec4 omega_sq{};  ///< squared rotor speeds, clamped to limits
  bool saturated = false;
};

/**
 * Wrench -> squared rotor speeds.
 *
 * Solves the 4x4 subsystem (f_z row plus torque rows) exactly, then
 * clamps to the speed limits. Saturation is clamp-and-report; demand is
 * not redistributed.
 */
inline AllocationResult allocate(const MixerMatrix& mixer,
                                 const Wrench4& demand, double omega_sq_min,
                                 double omega_sq_max) {
  if (!(omega_sq_min >= 0.0 && omega_sq_min < omega_sq_max))
    throw DomainError("invalid rotor speed limits");
  if (!std::isfinite(demand.f_z) || !std::isfinite(demand.tau_phi) ||
      !std::isfinite(demand.tau_theta) || !std::isfinite(demand.tau_psi))
    throw DomainError("non-finite wrench demand");

  Mat4 a{};
  const int rows[4] = {MixerMatrix::kFz, MixerMatrix::kTauPhi,
                       MixerMatrix::kTauTheta, MixerMatrix::kTauPsi};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a[r][c] = mixer.m[rows[r]][c];

  const Vec4 b{demand.f_z, demand.tau_phi, demand.tau_theta, demand.tau_psi};
  Vec4 x = solve4(a, b);

  AllocationResult result;
  for (int i = 0; i < 4; ++i) {
    double v = x[i];
    if (v < omega_sq_min) {
      v = omega_sq_min;
      result.saturated = true;
    } else if (v > omega_sq_max) {
      v = omega_sq_max;
      result.saturated = true;
    }
    result.omega_sq[i] = v;
  }
  return result;
}

struct TiltUpdate {
  TiltAngles tilt;
  std::array<bool, 4> arm_valid{true, true, true, true};
  bool valid = true; ///< false when any arm left the quasi-static region
};

/**
 * Per-timestep tilt update from the previous rotor speeds.
 *
 * T_i = C_T w_i^2 from the previous step feeds the deflection model. An
 * angle beyond the validity limit is reset to zero and the step flagged:
 * the static model has no meaning there, so the mixer falls back to the
 * rigid entries for that arm rather than extrapolating.
 */
inline TiltUpdate update_tilt_quasistatic(const RotorLayout& layout,
                                          const ArmDeflectionModel& model,
                                          const Vec4& prev_omega_sq,
                                          double prev_power_w) {
  TiltUpdate update;
  for (int i = 0; i < 4; ++i) {
    if (prev_omega_sq[i] < 0.0)
      throw DomainError("squared rotor speed must be non-negative");
    const double thrust = layout.c_t * prev_omega_sq[i];
    const DeflectionResult res = evaluate_deflection(model, thrust, prev_power_w);
    if (!res.valid) {
      update.tilt.alpha_deg[i] = 0.0; // non-linear region, invalid model
      update.arm_valid[i] = false;
      update.valid = false;
    } else {
      update.tilt.alpha_deg[i] = res.alpha_deg;
    }
  }
  return update;
}

/// Small-angle lateral and vertical force, angles taken in radians:
/// f_z ~ sum(T_i), f_x ~ -a1 T1 - a2 T2 + a3 T3 + a4 T4.
inline std::pair<double, double> small_angle_forces(const TiltAngles& tilt,
                                                    const Vec4& thrusts_n) {
  double f_x = 0.0;
  double f_z = 0.0;
  const int side[4] = {+1, +1, -1, -1};
  for (int i = 0; i < 4; ++i) {
    f_x += -side[i] * deg2rad(tilt.alpha_deg[i]) * thrusts_n[i];
    f_z += thrusts_n[i];
  }
  return {f_x, f_z};
}

} // namespace flexquad
