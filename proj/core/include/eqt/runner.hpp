#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "eqt/config.hpp"

namespace eqt {

enum class Command { kPrepare, kTomo, kTable1, kEcho, kShifts };

std::string to_string(Command c);
/// Throws ConfigError for an unknown name.
Command parse_command(const std::string& name);

struct RunOptions {
  std::filesystem::path out_dir = "eqt-out";
  std::size_t workers = 1;  ///< never affects outputs
  std::optional<std::string> state;  ///< tomo only; defaults to tomography.state
};

/// Ensemble the tomography and echo experiments run on: the prepared spike or a
/// directly sampled one, per spike.source. `report` is filled when prepared.
IonEnsemble spike_ensemble(const ExperimentConfig& config, std::size_t workers,
                           PreparationReport* report = nullptr);

/// Runs one subcommand and writes its outputs, config.resolved and
/// manifest.json into options.out_dir. Progress goes to `log`.
void run_command(Command command, const ExperimentConfig& config, const RunOptions& options,
                 std::ostream& log);

struct Manifest {
  Command command = Command::kPrepare;
  ExperimentConfig config;
  std::optional<std::string> state;
};

/// Reads a manifest.json written by run_command.
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace eqt
