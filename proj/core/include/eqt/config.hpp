#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eqt/detection.hpp"
#include "eqt/ensemble.hpp"
#include "eqt/interactions.hpp"
#include "eqt/spectral_prep.hpp"
#include "eqt/tomography.hpp"

namespace eqt {

enum class ValueKind { kFrequency, kTime, kLength, kCount, kReal, kBool, kChoice, kText };

/// One documented configuration key.
struct KeySpec {
  std::string key;
  ValueKind kind;
  std::string default_text;
  std::vector<std::string> choices;  ///< kChoice only
  std::string doc;
};

/// Every accepted key in echo order.
const std::vector<KeySpec>& config_schema();

/// Parsed configuration. Values keep their literal text; numbers are decoded
/// from it on demand, so a document rebuilt from resolved_text() yields
/// bit-identical values.
class ExperimentConfig {
 public:
  /// All documented defaults.
  ExperimentConfig();

  /// Dotted `key = value` lines; `[section]` prefixes following keys; `#` starts
  /// a comment. Throws ConfigError naming the key and line for unknown keys,
  /// duplicates, malformed values or missing unit suffixes.
  static ExperimentConfig parse(const std::string& text, const std::string& source = "<config>");
  static ExperimentConfig load(const std::string& path);

  /// Sets one key from text, validating it.
  void set(const std::string& key, const std::string& value_text);

  /// Frequencies in Hz, times in s, lengths in nm.
  double number(const std::string& key) const;
  std::uint64_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;

  /// Fully resolved document, one `key = value` per line in schema order.
  std::string resolved_text() const;
  /// FNV-1a 64 hash of resolved_text(), as 16 hex digits.
  std::string hash() const;

  std::uint64_t seed() const { return count("seed"); }

  /// Checks cross-key constraints by building every module's parameters.
  void validate() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Raw (pre-hole-burning) slice; frequencies converted to rad/s.
EnsembleSpec raw_ensemble_spec(const ExperimentConfig& c);
/// Directly sampled spike used when spike.source = sampled.
EnsembleSpec sampled_spike_spec(const ExperimentConfig& c);
PreparationPlan preparation_plan(const ExperimentConfig& c);
NoiseModel noise_model(const ExperimentConfig& c);
TomographySetup tomography_setup(const ExperimentConfig& c, std::size_t workers);
InteractionModel interaction_model(const ExperimentConfig& c);
EchoExperiment echo_experiment(const ExperimentConfig& c);
std::vector<double> tau_grid(const ExperimentConfig& c);

/// "re+imi,re+imi" into a normalized state; `correction` as in TargetState::normalized.
TargetState parse_state(const std::string& text, double* correction = nullptr);

}  // namespace eqt
