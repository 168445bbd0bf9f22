#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "flexquad/controller.hpp"
#include "flexquad/csv.hpp"
#include "flexquad/dynamics.hpp"
#include "flexquad/mixer.hpp"
#include "flexquad/perch.hpp"
#include "flexquad/scenario.hpp"

namespace flexquad {

struct SimResult {
  std::vector<TraceRow> trace;
  bool any_invalid = false; ///< some arm left the quasi-static region
};

/**
 * Scenario simulation loop.
 *
 * The controller runs at dt_control and sees the true state; its mixer
 * is rebuilt each step from the previous speeds through the nominal
 * deflection model (or held rigid when corrections are off). The plant
 * integrates at dt_physics with the true per-arm deflections, including
 * any fatigue gain the controller's model knows nothing about. After a
 * landing trigger the vehicle is attached and the per-arm tendon loops
 * take over.
 */
class Simulator {
public:
  explicit Simulator(const Scenario& scenario)
      : sc_(scenario), layout_(scenario.layout()),
        controller_(scenario.gains, scenario.vehicle) {
    sc_.validate();
    for (int i = 0; i < 4; ++i)
      plant_models_[i] = apply_degradation(sc_.degradation, sc_.arm_model, i);
  }

  SimResult run() {
    SimResult result;
    const double dt_c = sc_.sim.dt_control_s;
    const double dt_p = sc_.sim.dt_physics_s;
    const int substeps = static_cast<int>(std::round(dt_c / dt_p));
    const int control_steps =
        static_cast<int>(std::round(sc_.sim.duration_s / dt_c));
    result.trace.reserve(control_steps);

    VehicleState state = trimmed_initial_state();
    controller_.reset();
    AttitudeSetpoint setpoint;
    Vec4 omega_sq = hover_speeds(state);

    std::vector<ActiveImpulse> impulses;
    std::size_t next_event = 0;
    auto events = sc_.events;
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });

    bool landing_active = false;
    std::vector<PerchArm> arms;

    for (int k = 0; k < control_steps; ++k) {
      const double t = k * dt_c;

      while (next_event < events.size() && events[next_event].t <= t + 1e-12) {
        const Event& ev = events[next_event++];
        switch (ev.type) {
          case Event::Type::AttitudeSetpoint:
            setpoint = ev.setpoint;
            break;
          case Event::Type::MomentImpulse:
            impulses.push_back({ev.axis, ev.magnitude_nm, ev.t + ev.duration_s});
            break;
          case Event::Type::LandingTrigger:
            if (sc_.landing && !landing_active) {
              landing_active = true;
              arms = make_perch_arms();
            }
            break;
        }
      }

      TraceRow row;
      row.time_s = t + dt_c;

      if (!landing_active) {
        const Wrench4 cmd = controller_.attitude_step(state, setpoint, dt_c);

        const TiltAngles ctrl_tilt = controller_tilt(omega_sq);
        const MixerMatrix mixer =
            build_mixer(layout_, ctrl_tilt, sc_.corrected_torque);
        omega_sq = allocate(mixer, cmd, layout_.omega_sq_min,
                            layout_.omega_sq_max)
                       .omega_sq;

        bool valid = true;
        const TiltAngles plant_tilt = plant_tilt_from(omega_sq, valid);
        state.tilt = plant_tilt;
        if (!valid) result.any_invalid = true;

        BodyWrench wrench = rotor_body_wrench(layout_, plant_tilt, omega_sq);
        for (int s = 0; s < substeps; ++s) {
          const double ts = t + s * dt_p;
          Vec3 torque = wrench.torque;
          for (const auto& imp : impulses)
            if (ts < imp.t_end) torque[imp.axis] += imp.magnitude_nm;
          BodyWrench stepped{wrench.force, torque};
          state = rk4_advance(state, stepped, sc_.vehicle, dt_p);
          check_upright(state);
        }

        row.tau_phi = cmd.tau_phi;
        row.tau_theta = cmd.tau_theta;
        row.tau_psi = cmd.tau_psi;
        row.valid_flag = valid ? 1 : 0;
        for (int i = 0; i < 4; ++i)
          row.thrust_n[i] = layout_.c_t * omega_sq[i];
      } else {
        // Attached to the pipe: rotors idle at the landing throttle and
        // the tendon loops regulate contact pressure.
        const double idle =
            sc_.landing->throttle_fraction * sc_.vehicle.mass_kg *
            sc_.vehicle.gravity / 4.0;
        for (int i = 0; i < 4; ++i) row.thrust_n[i] = idle;
        for (auto& arm : arms) {
          const FsrReading reading =
              fsr_sample(arm.pressure, sc_.landing->noise_sigma, arm.rng);
          const PerchCommand cmd = landing_pid_step(
              sc_.landing->target_pressure, reading, arm.pid, dt_c);
          const PerchStepResult res =
              plant_step(sc_.landing->plant, arm.winding_deg, cmd, dt_c);
          arm.winding_deg = res.winding_deg;
          arm.pressure = res.pressure;
          arm.command = cmd.servo_torque_kgcm;
        }
        for (std::size_t i = 0; i < arms.size(); ++i) {
          row.s[i] = arms[i].pressure / sc_.landing->plant.p_max;
          row.u[i] = arms[i].command / (0.5 * kServoTorqueMax);
        }
      }

      row.position = state.position;
      row.velocity = state.velocity;
      row.attitude = state.attitude;
      row.body_rates = state.body_rates;
      for (int i = 0; i < 4; ++i) row.alpha_deg[i] = state.tilt.alpha_deg[i];
      result.trace.push_back(row);
    }

    return result;
  }

private:
  struct ActiveImpulse {
    int axis;
    double magnitude_nm;
    double t_end;
  };

  struct PerchArm {
    Pid pid;
    std::mt19937_64 rng;
    double winding_deg = 0.0;
    double pressure = 0.0;
    double command = 0.0;
  };

  std::vector<PerchArm> make_perch_arms() const {
    std::vector<PerchArm> arms;
    for (int i = 0; i < sc_.landing->arm_count; ++i) {
      PerchArm arm{Pid(sc_.landing->gains),
                   std::mt19937_64(sc_.sim.seed ^
                                   (0x9E3779B97F4A7C15ull * (i + 1))),
                   0.0, 0.0, 0.0};
      arms.push_back(std::move(arm));
    }
    return arms;
  }

  /// Controller-side tilt estimate: the quasi-static update through the
  /// nominal model, or rigid when corrections are disabled.
  TiltAngles controller_tilt(const Vec4& prev_omega_sq) const {
    if (!sc_.corrections) return TiltAngles{};
    return update_tilt_quasistatic(layout_, sc_.arm_model, prev_omega_sq,
                                   sc_.arm_model.p0_w)
        .tilt;
  }

  /// True plant deflections, including per-arm fatigue gains. No reset:
  /// the physical arm keeps bending past the model's validity limit; the
  /// excursion is just flagged.
  TiltAngles plant_tilt_from(const Vec4& omega_sq, bool& valid) const {
    TiltAngles tilt;
    valid = true;
    for (int i = 0; i < 4; ++i) {
      const double thrust = layout_.c_t * omega_sq[i];
      const DeflectionResult res =
          evaluate_deflection(plant_models_[i], thrust, sc_.arm_model.p0_w);
      tilt.alpha_deg[i] = res.alpha_deg;
      if (!res.valid) valid = false;
    }
    return tilt;
  }

  Vec4 hover_speeds(const VehicleState& state) const {
    const Wrench4 hover{sc_.vehicle.mass_kg * sc_.vehicle.gravity, 0.0, 0.0,
                        0.0};
    const MixerMatrix mixer =
        build_mixer(layout_, sc_.corrections ? state.tilt : TiltAngles{},
                    sc_.corrected_torque);
    return allocate(mixer, hover, layout_.omega_sq_min, layout_.omega_sq_max)
        .omega_sq;
  }

  /// Fixed-point hover trim so runs start settled instead of falling
  /// through the initial transient.
  VehicleState trimmed_initial_state() const {
    VehicleState state;
    Vec4 omega_sq{};
    TiltAngles ctrl_tilt;
    const Wrench4 hover{sc_.vehicle.mass_kg * sc_.vehicle.gravity, 0.0, 0.0,
                        0.0};
    for (int iter = 0; iter < 40; ++iter) {
      const MixerMatrix mixer = build_mixer(
          layout_, sc_.corrections ? ctrl_tilt : TiltAngles{},
          sc_.corrected_torque);
      omega_sq = allocate(mixer, hover, layout_.omega_sq_min,
                          layout_.omega_sq_max)
                     .omega_sq;
      if (sc_.corrections)
        ctrl_tilt = update_tilt_quasistatic(layout_, sc_.arm_model, omega_sq,
                                            sc_.arm_model.p0_w)
                        .tilt;
    }
    bool valid = true;
    state.tilt = plant_tilt_from(omega_sq, valid);
    return state;
  }

  Scenario sc_;
  RotorLayout layout_;
  FlightController controller_;
  std::array<ArmDeflectionModel, 4> plant_models_{};
};

} // namespace flexquad
