// Scenario-driven simulator CLI: runs maneuvers, sweeps and landings
// from a JSON scenario file and writes CSV traces and summaries.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flexquad/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAbort = 2;
constexpr int kExitNoConvergence = 3;

void apply_overrides(flexquad::Scenario& scenario, const std::string& config,
                     const std::string& corrections, long long seed) {
  if (!config.empty()) {
    if (config == "A")
      scenario.configuration = flexquad::FrameConfiguration::A;
    else if (config == "B")
      scenario.configuration = flexquad::FrameConfiguration::B;
    else
      throw flexquad::ConfigError("--config must be A or B");
  }
  if (!corrections.empty()) {
    if (corrections == "on")
      scenario.corrections = true;
    else if (corrections == "off")
      scenario.corrections = false;
    else
      throw flexquad::ConfigError("--corrections must be on or off");
  }
  if (seed >= 0) scenario.sim.seed = static_cast<std::uint64_t>(seed);
}

int dispatch(const std::function<int()>& body) {
  try {
    return body();
  } catch (const flexquad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const flexquad::SimulationAbort& e) {
    std::cerr << "simulation abort: " << e.what() << "\n";
    return kExitAbort;
  } catch (const flexquad::NoConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"flexible-arm quadrotor simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string config_override;
  std::string corrections_override;
  long long seed_override = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "scenario JSON file")
        ->required();
    cmd->add_option("-o,--out", out_dir, "output directory");
    cmd->add_option("--config", config_override,
                    "rotor spin configuration override (A|B)");
    cmd->add_option("--corrections", corrections_override,
                    "mixer tilt corrections override (on|off)");
    cmd->add_option("--seed", seed_override, "seed override");
  };

  CLI::App* run = app.add_subcommand("run", "run one scenario");
  add_common(run);

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep);
  std::string sweep_param;
  std::vector<double> sweep_values;
  sweep->add_option("--param", sweep_param, "dotted parameter path")
      ->required();
  sweep->add_option("--values", sweep_values, "values to sweep")
      ->required()
      ->delimiter(',');

  CLI::App* dump = app.add_subcommand("dump-mixer",
                                      "write the scenario's mixer matrix");
  add_common(dump);

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return dispatch([&] {
      flexquad::Scenario sc = flexquad::load_scenario(scenario_path);
      apply_overrides(sc, config_override, corrections_override, seed_override);
      const auto out = flexquad::run_scenario(sc, out_dir);
      std::cout << "trace:   " << out.trace_path.string() << "\n"
                << "summary: " << out.summary_path.string() << "\n";
      for (const auto& [k, v] : out.summary)
        std::printf("  %-32s %.6g\n", k.c_str(), v);
      return kExitOk;
    });
  }

  if (sweep->parsed()) {
    return dispatch([&] {
      // Overrides apply through the per-value loads.
      const auto entries = flexquad::sweep_scenario(scenario_path, sweep_param,
                                                    sweep_values, out_dir);
      int failures = 0;
      for (const auto& e : entries) {
        if (e.error.empty()) {
          std::printf("%s = %-10g ok\n", sweep_param.c_str(), e.value);
        } else {
          std::printf("%s = %-10g error: %s\n", sweep_param.c_str(), e.value,
                      e.error.c_str());
          ++failures;
        }
      }
      std::cout << "aggregate: " << (std::filesystem::path(out_dir) / "sweep.csv").string()
                << "\n";
      return failures == static_cast<int>(entries.size()) && !entries.empty()
                 ? kExitConfig
                 : kExitOk;
    });
  }

  // dump-mixer
  return dispatch([&] {
    flexquad::Scenario sc = flexquad::load_scenario(scenario_path);
    apply_overrides(sc, config_override, corrections_override, seed_override);
    const auto layout = sc.layout();
    // Mixer at the hover-trim tilt of the scenario's deflection model.
    flexquad::Vec4 omega_sq{};
    const double hover = sc.vehicle.mass_kg * sc.vehicle.gravity / 4.0;
    for (auto& w : omega_sq) w = hover / layout.c_t;
    const auto tilt = flexquad::update_tilt_quasistatic(
        layout, sc.arm_model, omega_sq, sc.arm_model.p0_w);
    const auto mixer = flexquad::build_mixer(layout, tilt.tilt,
                                             sc.corrected_torque);
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "mixer.csv";
    std::vector<std::vector<std::string>> rows;
    const char* names[6] = {"f_x", "f_y", "f_z", "tau_phi", "tau_theta",
                            "tau_psi"};
    for (int r = 0; r < 6; ++r) {
      std::vector<std::string> row{names[r]};
      for (int c = 0; c < 4; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.12g", mixer.m[r][c]);
        row.push_back(buf);
      }
      rows.push_back(std::move(row));
    }
    flexquad::write_table_csv(path.string(),
                              {"row", "rotor1", "rotor2", "rotor3", "rotor4"},
                              rows);
    std::cout << "mixer: " << path.string() << "\n";
    return kExitOk;
  });
}
