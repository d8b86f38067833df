// eqt: command line front end for the ensemble qubit tomography simulator.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eqt/config.hpp"
#include "eqt/error.hpp"
#include "eqt/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string default_out_dir() {
  if (const char* env = std::getenv("EQT_OUTPUT_DIR"); env && *env) return env;
  return "eqt-out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate hole-burnt ensemble qubits: preparation, tomography and echo experiments"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = default_out_dir();
  std::size_t workers = 1;
  std::string manifest_path;
  std::optional<std::string> state;

  app.add_option("--config,-c", config_path, "configuration file (dotted key = value)");
  app.add_option("--seed", seed, "override the seed key");
  app.add_option("--out,-o", out_dir, "output directory (default $EQT_OUTPUT_DIR or eqt-out)");
  app.add_option("--workers,-j", workers, "worker threads, 0 = all cores; outputs do not depend on it");
  app.add_option("--from-manifest", manifest_path, "rerun the command recorded in a manifest.json");

  app.add_subcommand("prepare", "hole-burning pipeline report and spectra");
  auto* tomo = app.add_subcommand("tomo", "tomography trace and estimate for one state");
  tomo->add_option("--state", state, "amplitudes \"re+imi,re+imi\"");
  app.add_subcommand("table1", "fidelity table for the seven test states");
  app.add_subcommand("echo", "echo amplitude versus delay for the three perturbation timings");
  app.add_subcommand("shifts", "distribution of excitation-induced frequency shifts");

  CLI11_PARSE(app, argc, argv);

  try {
    eqt::Command command;
    eqt::ExperimentConfig config;
    if (!manifest_path.empty()) {
      eqt::Manifest m = eqt::load_manifest(manifest_path);
      command = m.command;
      config = std::move(m.config);
      if (!state) state = m.state;
    } else {
      if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return kExitConfig;
      }
      command = eqt::parse_command(app.get_subcommands().front()->get_name());
      if (!config_path.empty()) config = eqt::ExperimentConfig::load(config_path);
    }
    if (seed) {
      config.set("seed", std::to_string(*seed));
      config.validate();
    }
    eqt::RunOptions options;
    options.out_dir = out_dir;
    options.workers = workers;
    options.state = state;
    eqt::run_command(command, config, options, std::cerr);
    std::cerr << "wrote " << out_dir << "\n";
    return 0;
  } catch (const eqt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
