#pragma once

#include <array>
#include <cmath>

#include "flexquad/math.hpp"
#include "flexquad/mixer.hpp"
#include "flexquad/rotor_layout.hpp"

namespace flexquad {

struct VehicleParams {
  double mass_kg = 1.8;
  Vec3 inertia = {0.05, 0.05, 0.09}; ///< (I_x, I_y, I_z), kg.m^2
  double gravity = 9.81;

  void validate() const {
    if (!(mass_kg > 0.0)) throw DomainError("mass must be positive");
    for (double i : inertia)
      if (!(i > 0.0)) throw DomainError("inertias must be positive");
  }
};

/**
 * Full vehicle state. World frame z-up, attitude as ZYX Euler angles
 * (yaw-pitch-roll), body rates in the body frame, plus the per-arm
 * deflection angles that make the rotor set non-coplanar.
 */
struct VehicleState {
  Vec3 position{};   ///< m, world
  Vec3 velocity{};   ///< m/s, world
  Vec3 attitude{};   ///< (phi, theta, psi), rad
  Vec3 body_rates{}; ///< (p, q, r), rad/s
  TiltAngles tilt{};
};

/// Rotation matrix body->world for ZYX Euler angles, returned as rows.
inline std::array<Vec3, 3> rotation_body_to_world(const Vec3& att) {
  const double cphi = std::cos(att[0]), sphi = std::sin(att[0]);
  const double cth = std::cos(att[1]), sth = std::sin(att[1]);
  const double cpsi = std::cos(att[2]), spsi = std::sin(att[2]);
  return {{{cpsi * cth, cpsi * sth * sphi - spsi * cphi,
            cpsi * sth * cphi + spsi * sphi},
           {spsi * cth, spsi * sth * sphi + cpsi * cphi,
            spsi * sth * cphi - cpsi * sphi},
           {-sth, cth * sphi, cth * cphi}}};
}

inline Vec3 mat_vec(const std::array<Vec3, 3>& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

/**
 * Translational acceleration in the printed flexible-quad form.
 *
 * T is the plain thrust sum and the flexible lateral term is the
 * small-angle combination -a1 T1 - a2 T2 + a3 T3 + a4 T4 (angles in
 * radians, taken from the state's tilt). Gravity acts on world z; the
 * vertical equation uses the conventional c(theta) c(phi) projection of
 * the thrust sum.
 */
inline Vec3 translational_accel(const VehicleState& state,
                                const Vec4& thrusts_n,
                                const VehicleParams& params) {
  for (double t : thrusts_n)
    if (t < 0.0) throw DomainError("rotor thrust must be non-negative");

  const double cphi = std::cos(state.attitude[0]),
               sphi = std::sin(state.attitude[0]);
  const double cth = std::cos(state.attitude[1]),
               sth = std::sin(state.attitude[1]);
  const double cpsi = std::cos(state.attitude[2]),
               spsi = std::sin(state.attitude[2]);

  const double thrust_sum =
      thrusts_n[0] + thrusts_n[1] + thrusts_n[2] + thrusts_n[3];
  const auto [flex, fz_small] = small_angle_forces(state.tilt, thrusts_n);
  (void)fz_small;

  const double m = params.mass_kg;
  const double ax =
      (-(spsi * sth * cphi - cpsi * sphi) * thrust_sum + (cth * spsi) * flex) /
      m;
  const double ay =
      (-(cpsi * sth * cphi + spsi * sphi) * thrust_sum + (cth * cpsi) * flex) /
      m;
  const double az =
      (cth * cphi * thrust_sum - sth * flex) / m - params.gravity;
  return {ax, ay, az};
}

/// Sensitivities of the flexibility-induced moments to the applied
/// control torques. Negative means the elastic response opposes the
/// command on that axis.
struct StabilityDerivatives {
  double c_m_tau_phi = 0.0;
  double c_m_tau_theta = 0.0;
  double c_m_tau_psi = 0.0;
};

/**
 * Rotational accelerations with the stability-derivative terms:
 * I_i * accel_i = M'_i - tau_i + C_M_i * tau_i per axis. The roll axis
 * uses I_x (the printed roll equation reuses I_z, an evident misprint).
 */
inline Vec3 rotational_accel(const Vec3& applied_torques,
                             const Vec3& perturbations,
                             const StabilityDerivatives& stab,
                             const VehicleParams& params) {
  const Vec3 c{stab.c_m_tau_phi, stab.c_m_tau_theta, stab.c_m_tau_psi};
  Vec3 accel{};
  for (int i = 0; i < 3; ++i) {
    accel[i] = (perturbations[i] - applied_torques[i] +
                c[i] * applied_torques[i]) /
               params.inertia[i];
  }
  return accel;
}

struct BodyWrench {
  Vec3 force{};  ///< body frame, N
  Vec3 torque{}; ///< body frame, N.m
};

/**
 * Physical wrench generated by the rotor set for the true arm tilt.
 *
 * Each rotor's thrust vector tilts by its deflection angle in the arm's
 * bending plane (thrust leans inboard when the arm bends up), so the
 * moment of each thrust is taken about the actual rotor position. The
 * rotor plane sits above the center of mass, which is what lets the
 * lateral components of the tilted thrusts contribute to the vehicle's
 * rotation. The spin drag reaction acts about body z. This is the
 * plant-side model; the mixer is the controller's approximation of it.
 */
inline BodyWrench rotor_body_wrench(const RotorLayout& layout,
                                    const TiltAngles& tilt,
                                    const Vec4& omega_sq) {
  BodyWrench w;
  for (int i = 0; i < 4; ++i) {
    const Rotor& rotor = layout.rotors[i];
    const double thrust = layout.c_t * omega_sq[i];
    const double alpha = deg2rad(tilt.alpha_deg[i]);
    const int side = rotor.arm_side();
    const Vec3 t{0.0, -side * std::sin(alpha) * thrust,
                 std::cos(alpha) * thrust};
    const Vec3 r{rotor.x_m, rotor.y_m, rotor.z_m};
    w.force = w.force + t;
    w.torque = w.torque + cross(r, t);
    w.torque[2] += -spin_sign(rotor.spin) * layout.c_q * omega_sq[i];
  }
  return w;
}

/// ZYX Euler angle rates from body rates.
inline Vec3 euler_rates(const Vec3& att, const Vec3& pqr) {
  const double cphi = std::cos(att[0]), sphi = std::sin(att[0]);
  const double cth = std::cos(att[1]), tth = std::tan(att[1]);
  return {pqr[0] + sphi * tth * pqr[1] + cphi * tth * pqr[2],
          cphi * pqr[1] - sphi * pqr[2],
          (sphi * pqr[1] + cphi * pqr[2]) / cth};
}

namespace detail {

using State12 = std::array<double, 12>;

inline State12 pack(const VehicleState& s) {
  return {s.position[0],   s.position[1],   s.position[2],
          s.velocity[0],   s.velocity[1],   s.velocity[2],
          s.attitude[0],   s.attitude[1],   s.attitude[2],
          s.body_rates[0], s.body_rates[1], s.body_rates[2]};
}

inline void unpack(const State12& a, VehicleState& s) {
  s.position = {a[0], a[1], a[2]};
  s.velocity = {a[3], a[4], a[5]};
  s.attitude = {a[6], a[7], a[8]};
  s.body_rates = {a[9], a[10], a[11]};
}

inline State12 derivative(const State12& a, const BodyWrench& wrench,
                          const VehicleParams& params) {
  const Vec3 att{a[6], a[7], a[8]};
  const Vec3 pqr{a[9], a[10], a[11]};

  const auto rot = rotation_body_to_world(att);
  Vec3 accel = mat_vec(rot, wrench.force);
  accel = {accel[0] / params.mass_kg, accel[1] / params.mass_kg,
           accel[2] / params.mass_kg - params.gravity};

  const Vec3 att_dot = euler_rates(att, pqr);

  const Vec3& inertia = params.inertia;
  const Vec3 i_omega{inertia[0] * pqr[0], inertia[1] * pqr[1],
                     inertia[2] * pqr[2]};
  const Vec3 gyro = cross(pqr, i_omega);
  const Vec3 pqr_dot{(wrench.torque[0] - gyro[0]) / inertia[0],
                     (wrench.torque[1] - gyro[1]) / inertia[1],
                     (wrench.torque[2] - gyro[2]) / inertia[2]};

  return {a[3],       a[4],       a[5],       accel[0],   accel[1],
          accel[2],   att_dot[0], att_dot[1], att_dot[2], pqr_dot[0],
          pqr_dot[1], pqr_dot[2]};
}

inline State12 axpy(const State12& a, double h, const State12& d) {
  State12 out;
  for (int i = 0; i < 12; ++i) out[i] = a[i] + h * d[i];
  return out;
}

} // namespace detail

/// One fixed-step RK4 advance under a constant body wrench. The tilt
/// field is carried through unchanged; callers update it separately at
/// the quasi-static rate.
inline VehicleState rk4_advance(const VehicleState& state,
                                const BodyWrench& wrench,
                                const VehicleParams& params, double dt) {
  using detail::State12;
  const State12 y0 = detail::pack(state);
  const State12 k1 = detail::derivative(y0, wrench, params);
  const State12 k2 =
      detail::derivative(detail::axpy(y0, dt / 2.0, k1), wrench, params);
  const State12 k3 =
      detail::derivative(detail::axpy(y0, dt / 2.0, k2), wrench, params);
  const State12 k4 = detail::derivative(detail::axpy(y0, dt, k3), wrench, params);

  State12 y1;
  for (int i = 0; i < 12; ++i)
    y1[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  VehicleState next = state;
  detail::unpack(y1, next);
  return next;
}

inline void check_upright(const VehicleState& state) {
  if (std::abs(state.attitude[0]) >= kPi / 2.0 ||
      std::abs(state.attitude[1]) >= kPi / 2.0)
    throw SimulationAbort("vehicle inverted");
  if (!all_finite(state.position) || !all_finite(state.velocity) ||
      !all_finite(state.attitude) || !all_finite(state.body_rates))
    throw SimulationAbort("non-finite state");
}

/**
 * One combined simulation step: allocate the commanded wrench through
 * the tilt-aware mixer, update the tilt quasi-statically from the
 * allocated speeds, and integrate the resulting physical wrench.
 * Deterministic; aborts when the vehicle inverts.
 */
inline VehicleState step(const VehicleState& state, const Wrench4& command,
                         const RotorLayout& layout,
                         const ArmDeflectionModel& arm_model,
                         const VehicleParams& params, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");

  const MixerMatrix mixer = build_mixer(layout, state.tilt);
  const AllocationResult alloc =
      allocate(mixer, command, layout.omega_sq_min, layout.omega_sq_max);
  const TiltUpdate tilt_next =
      update_tilt_quasistatic(layout, arm_model, alloc.omega_sq, arm_model.p0_w);

  const BodyWrench wrench =
      rotor_body_wrench(layout, tilt_next.tilt, alloc.omega_sq);
  VehicleState next = rk4_advance(state, wrench, params, dt);
  next.tilt = tilt_next.tilt;
  check_upright(next);
  return next;
}

/**
 * Relative weight of the flexible lateral force during a roll maneuver:
 * kappa = (dalpha * dthrust) / (sin(phi) * total_thrust).
 */
inline double kappa(double delta_alpha_rad, double delta_thrust_n,
                    double phi_rad, double total_thrust_n) {
  if (phi_rad == 0.0)
    throw DomainError("kappa is undefined at phi = 0");
  if (!(total_thrust_n > 0.0))
    throw DomainError("total thrust must be positive");
  return delta_alpha_rad * delta_thrust_n /
         (std::sin(phi_rad) * total_thrust_n);
}

} // namespace flexquad
