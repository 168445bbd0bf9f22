#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "flexquad/runner.hpp"

using namespace flexquad;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "flexquad_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kRollScenario = R"json({
  "name": "roll_test",
  "vehicle": {
    "mass_kg": 1.8,
    "inertia": [0.05, 0.05, 0.09],
    "layout": {"configuration": "B", "arm_length_m": 0.2},
    "arm_model": {"rho_tpu": 8.0, "deflection_scale": 7.0}
  },
  "controller": {"corrections": true},
  "events": [
    {"t": 0.5, "type": "attitude_setpoint", "phi_deg": 25.0},
    {"t": 4.0, "type": "attitude_setpoint"}
  ],
  "sim": {"dt_physics_s": 0.001, "dt_control_s": 0.004, "duration_s": 5.0, "seed": 7}
})json";

} // namespace

TEST_CASE("scenario round trip from file") {
  const auto path = write_temp("roll.json", kRollScenario);
  const Scenario s = load_scenario(path.string());
  CHECK(s.name == "roll_test");
  CHECK(s.configuration == FrameConfiguration::B);
  CHECK(s.arm_model.rho_tpu == 8.0);
  CHECK(s.arm_model.scale == 7.0);
  REQUIRE(s.events.size() == 2);
  CHECK(s.events[0].type == Event::Type::AttitudeSetpoint);
  CHECK_THAT(s.events[0].setpoint.phi_rad,
             Catch::Matchers::WithinRel(deg2rad(25.0), 1e-12));
  CHECK(s.sim.seed == 7);
}

TEST_CASE("malformed configs are rejected with context") {
  SECTION("broken json") {
    const auto p = write_temp("broken.json", "{ not json");
    CHECK_THROWS_AS(load_scenario(p.string()), ConfigError);
  }
  SECTION("control step not a multiple of physics step") {
    const auto p = write_temp("dt.json", R"({
      "sim": {"dt_physics_s": 0.001, "dt_control_s": 0.0035}
    })");
    CHECK_THROWS_AS(load_scenario(p.string()), ConfigError);
  }
  SECTION("unknown configuration letter") {
    const auto p = write_temp("cfg.json", R"({
      "vehicle": {"layout": {"configuration": "C"}}
    })");
    CHECK_THROWS_AS(load_scenario(p.string()), ConfigError);
  }
  SECTION("unknown event type") {
    const auto p = write_temp("ev.json", R"({
      "events": [{"t": 1.0, "type": "explode"}]
    })");
    CHECK_THROWS_AS(load_scenario(p.string()), ConfigError);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/nope.json"), ConfigError);
  }
}

TEST_CASE("runs are bit-identical for equal seeds") {
  const auto path = write_temp("det.json", kRollScenario);
  const Scenario s = load_scenario(path.string());
  const fs::path base = fs::temp_directory_path() / "flexquad_tests";
  const auto out1 = run_scenario(s, base / "det1");
  const auto out2 = run_scenario(s, base / "det2");
  CHECK(slurp(out1.trace_path) == slurp(out2.trace_path));
  CHECK(slurp(out1.summary_path) == slurp(out2.summary_path));
  CHECK(slurp(base / "det1" / "trace_alt.csv") ==
        slurp(base / "det2" / "trace_alt.csv"));
}

TEST_CASE("summary is recomputable from the written traces") {
  const auto path = write_temp("recompute.json", kRollScenario);
  const Scenario s = load_scenario(path.string());
  const fs::path dir = fs::temp_directory_path() / "flexquad_tests" / "rc";
  const auto out = run_scenario(s, dir);

  const auto trace = read_trace_csv((dir / "trace.csv").string());
  const auto alt = read_trace_csv((dir / "trace_alt.csv").string());
  const Summary recomputed = compute_summary(trace, alt, s);

  REQUIRE(recomputed.size() == out.summary.size());
  for (std::size_t i = 0; i < recomputed.size(); ++i) {
    CHECK(recomputed[i].first == out.summary[i].first);
    CHECK_THAT(recomputed[i].second,
               Catch::Matchers::WithinAbs(out.summary[i].second, 1e-9));
  }
}

TEST_CASE("sweep aggregates per-value runs and keeps going on failure") {
  const auto path = write_temp("sweep.json", kRollScenario);
  const fs::path dir = fs::temp_directory_path() / "flexquad_tests" / "sweep";

  SECTION("single value equals a direct run") {
    const auto entries = sweep_scenario(path.string(),
                                        "vehicle.arm_model.rho_tpu", {8.0}, dir);
    REQUIRE(entries.size() == 1);
    REQUIRE(entries[0].error.empty());
    const Scenario s = load_scenario(path.string());
    const auto direct = run_scenario(s, dir / "direct");
    REQUIRE(entries[0].summary.size() == direct.summary.size());
    for (std::size_t i = 0; i < direct.summary.size(); ++i)
      CHECK(entries[0].summary[i].second == direct.summary[i].second);
  }

  SECTION("invalid value is recorded as an error row") {
    const auto entries = sweep_scenario(
        path.string(), "vehicle.arm_model.rho_tpu", {8.0, -5.0, 10.0}, dir / "err");
    REQUIRE(entries.size() == 3);
    CHECK_FALSE(entries[0].error.empty()); // sorted: -5 first
    CHECK(entries[1].error.empty());
    CHECK(entries[2].error.empty());
  }
}

TEST_CASE("empty event list is a hover hold with zero maneuver metrics") {
  Scenario s;
  s.sim.duration_s = 2.0;
  s.arm_model.rho_tpu = 8.0;
  const fs::path dir = fs::temp_directory_path() / "flexquad_tests" / "hover";
  const auto out = run_scenario(s, dir);
  CHECK(out.trace_alt.empty()); // no maneuver, no alternate pass
  for (const auto& [k, v] : out.summary) {
    if (k == "delta_alpha_max_deg") CHECK(std::abs(v) < 1e-6);
    if (k == "kappa") CHECK(v == 0.0);
    if (k == "xy_drift_final_m") CHECK(v < 1e-3);
  }
}
