#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "flexquad/perch.hpp"

using namespace flexquad;

namespace {

PerchPlant plant_for(double diameter_m, double rho) {
  PerchPlant p;
  p.pipe_diameter_m = diameter_m;
  p.rho_tpu = rho;
  return p;
}

std::vector<PerchTracePoint> landing(const PerchPlant& plant, double sigma,
                                     std::uint64_t seed, double duration = 12.0) {
  std::mt19937_64 rng(seed);
  return run_landing(plant, default_landing_gains(), kTargetContactPressure,
                     sigma, duration, 0.004, rng);
}

} // namespace

TEST_CASE("no torque, no pressure") {
  const auto plant = plant_for(0.25, 6.0);
  double winding = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto res = plant_step(plant, winding, PerchCommand{}, 0.004);
    winding = res.winding_deg;
    CHECK(res.pressure == 0.0);
  }
}

TEST_CASE("steady torque to hold the target grows with infill") {
  const double hold = kTargetContactPressure;
  double prev = 0.0;
  for (double rho : {4.0, 6.0, 8.0, 10.0}) {
    const double u = plant_for(0.25, rho).steady_torque_for(hold);
    CHECK(u > prev);
    prev = u;
  }
  // The calibrated corners bracket the bench measurements.
  CHECK(plant_for(0.25, 6.0).steady_torque_for(hold) > 3.5);
  CHECK(plant_for(0.15, 10.0).steady_torque_for(hold) < 10.0);
}

TEST_CASE("fsr sampling") {
  SECTION("zero sigma is exact") {
    std::mt19937_64 rng(1);
    CHECK(fsr_sample(950.0, 0.0, rng).pressure == 950.0);
  }

  SECTION("sample mean is unbiased at the target pressure") {
    std::mt19937_64 rng(99);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) sum += fsr_sample(950.0, 50.0, rng).pressure;
    CHECK_THAT(sum / n, Catch::Matchers::WithinAbs(950.0, 2.0));
  }

  SECTION("readings never go negative") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i)
      CHECK(fsr_sample(0.0, 50.0, rng).pressure >= 0.0);
  }

  SECTION("deterministic per seed") {
    const auto a = fsr_sample(500.0, 50.0, std::uint64_t{123});
    const auto b = fsr_sample(500.0, 50.0, std::uint64_t{123});
    CHECK(a.pressure == b.pressure);
  }
}

TEST_CASE("landing pid step") {
  Pid pid(default_landing_gains());

  SECTION("at target with empty integrator the command stays zero") {
    const auto cmd =
        landing_pid_step(950.0, FsrReading{950.0, 0.0}, pid, 0.004);
    CHECK(cmd.servo_torque_kgcm == 0.0);
  }

  SECTION("command is clamped to the servo range") {
    Pid fresh(default_landing_gains());
    const auto cmd =
        landing_pid_step(950.0, FsrReading{0.0, 0.0}, fresh, 0.004);
    CHECK(cmd.servo_torque_kgcm >= 0.0);
    CHECK(cmd.servo_torque_kgcm <= kServoTorqueMax);
  }
}

TEST_CASE("full landing regulates pressure despite sensor noise") {
  const auto plant = plant_for(0.25, 6.0);
  const auto trace = landing(plant, 50.0, 42);

  // Steady state: mean true pressure within +/-50 of target.
  const std::size_t tail = trace.size() - trace.size() / 5;
  double mean = 0.0;
  for (std::size_t i = tail; i < trace.size(); ++i) mean += trace[i].pressure;
  mean /= static_cast<double>(trace.size() - tail);
  CHECK_THAT(mean, Catch::Matchers::WithinAbs(kTargetContactPressure, 50.0));

  // Never above 1.2x target, command always within the servo range.
  for (const auto& pt : trace) {
    CHECK(pt.pressure <= 1.2 * kTargetContactPressure);
    CHECK(pt.command_kgcm >= 0.0);
    CHECK(pt.command_kgcm <= kServoTorqueMax);
  }
}

TEST_CASE("closure metrics across the diameter/infill grid") {
  struct Cell {
    double d, rho;
    ClosureMetrics metrics;
  };
  std::vector<Cell> grid;
  for (double d : {0.25, 0.15})
    for (double rho : {6.0, 10.0}) {
      const auto trace = landing(plant_for(d, rho), 50.0, 2025);
      grid.push_back({d, rho, closure_metrics(trace)});
    }

  const auto find = [&](double d, double rho) {
    for (const auto& c : grid)
      if (c.d == d && c.rho == rho) return c.metrics;
    FAIL("missing grid cell");
    return ClosureMetrics{};
  };

  const auto fast = find(0.25, 6.0);
  const auto slow = find(0.15, 10.0);

  // Largest pipe + softest arm closes fastest with the least torque.
  for (const auto& c : grid) {
    CHECK(fast.closure_time_s <= c.metrics.closure_time_s);
    CHECK(fast.steady_torque_kgcm <= c.metrics.steady_torque_kgcm + 1e-9);
  }

  // Monotone in rho at fixed D and in D at fixed rho.
  CHECK(find(0.25, 6.0).closure_time_s <= find(0.25, 10.0).closure_time_s);
  CHECK(find(0.15, 6.0).closure_time_s <= find(0.15, 10.0).closure_time_s);
  CHECK(find(0.25, 6.0).closure_time_s <= find(0.15, 6.0).closure_time_s);
  CHECK(find(0.25, 10.0).closure_time_s <= find(0.15, 10.0).closure_time_s);
  CHECK(find(0.25, 6.0).steady_torque_kgcm < find(0.25, 10.0).steady_torque_kgcm);
  CHECK(find(0.25, 6.0).steady_torque_kgcm < find(0.15, 6.0).steady_torque_kgcm);

  // Calibrated to the bench range.
  CHECK(fast.closure_time_s >= 2.0);
  CHECK(slow.closure_time_s <= 4.5);
}

TEST_CASE("metrics require convergence") {
  SECTION("zero-gain run never settles") {
    const auto plant = plant_for(0.25, 6.0);
    std::mt19937_64 rng(3);
    PidGains dead{0.0, 0.0, 0.0, kServoTorqueMax, 1.0};
    const auto trace =
        run_landing(plant, dead, kTargetContactPressure, 0.0, 3.0, 0.004, rng);
    CHECK_THROWS_AS(closure_metrics(trace), NoConvergenceError);
  }
  SECTION("empty trace") {
    CHECK_THROWS_AS(closure_metrics({}), NoConvergenceError);
  }
}

TEST_CASE("identical seeds give bit-identical traces") {
  const auto plant = plant_for(0.2, 8.0);
  const auto a = landing(plant, 50.0, 11, 5.0);
  const auto b = landing(plant, 50.0, 11, 5.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pressure == b[i].pressure);
    CHECK(a[i].reading == b[i].reading);
    CHECK(a[i].command_kgcm == b[i].command_kgcm);
  }
}
