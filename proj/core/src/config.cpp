#include "eqt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eqt/error.hpp"

namespace eqt {

namespace {

using K = ValueKind;

std::vector<KeySpec> build_schema() {
  const double third = 1.0 / 3.0;
  char third_text[32];
  std::snprintf(third_text, sizeof third_text, "%.17g", third);
  return {
      {"seed", K::kCount, "1", {}, "master seed for every random stream"},
      // Raw slice of the inhomogeneous line sampled before hole burning.
      {"ensemble.n_ions", K::kCount, "100000", {}, "ions in the raw slice"},
      {"ensemble.width", K::kFrequency, "1mhz", {}, "full width of the raw slice"},
      {"ensemble.rabi_spread", K::kReal, "0.5", {}, "fractional half width of rabi_scale"},
      {"ensemble.nominal_rabi", K::kFrequency, "250khz", {}, "nominal Rabi frequency"},
      {"prep.trench_width", K::kFrequency, "1mhz", {}, "full width of the burned trench"},
      {"prep.trench_residual", K::kReal, "0.001", {}, "probability an ion escapes burning"},
      {"prep.repump_rf_center", K::kFrequency, "34.5mhz", {}, "RF sweep center (metadata)"},
      {"prep.repump_rf_half_width", K::kFrequency, "1mhz", {}, "RF sweep half width (metadata)"},
      {"prep.aux_offset", K::kFrequency, "95.9mhz", {}, "aux beam offset (metadata)"},
      {"prep.antihole_fwhm", K::kFrequency, "300khz", {}, "repump acceptance FWHM"},
      {"prep.narrowing.band_outer", K::kFrequency, "500khz", {}, "zero-area pulse outer band edge"},
      {"prep.narrowing.band_inner", K::kFrequency, "25khz", {}, "zero-area pulse protected half width"},
      {"prep.narrowing.duration", K::kTime, "80us", {}, "zero-area pulse duration"},
      {"prep.narrowing.n_rounds", K::kCount, "20", {}, "zero-area pulse repetitions"},
      {"prep.narrowing.peak_rabi", K::kFrequency, "500khz", {}, "synthesis amplitude cap"},
      {"prep.rabi_select.pulse_duration", K::kTime, "4us", {}, "duration of each 2pi pulse"},
      {"prep.rabi_select.n_pulses", K::kCount, "10", {}, "number of 2pi pulses"},
      {"prep.rabi_select.inter_pulse_delay", K::kTime, "8ms", {}, "delay between 2pi pulses"},
      {"prep.branching.half", K::kReal, third_text, {}, "decay branching into 1/2"},
      {"prep.branching.three_half", K::kReal, third_text, {}, "decay branching into 3/2"},
      {"prep.branching.five_half", K::kReal, third_text, {}, "decay branching into 5/2"},
      {"spike.source", K::kChoice, "prepared", {"prepared", "sampled"},
       "tomography ensemble: full preparation or a directly sampled spike"},
      {"spike.n_ions", K::kCount, "10000", {}, "ions in a sampled spike"},
      {"spike.width", K::kFrequency, "50khz", {}, "full width of a sampled spike"},
      {"spike.rabi_spread", K::kReal, "0.1", {}, "rabi_scale half width of a sampled spike"},
      {"noise.shot_scale_jitter", K::kReal, "0.1", {}, "fractional std-dev of the trace scale"},
      {"noise.additive_noise_rms", K::kReal, "0", {}, "per-sample Gaussian noise"},
      {"detection.sample_interval", K::kTime, "0.1us", {}, "trace sample spacing"},
      {"detection.recovery_time", K::kTime, "10us", {}, "detector blanking after each pulse"},
      {"detection.emission_scale", K::kReal, "1", {}, "emission per coherent ion"},
      {"tomography.state", K::kText, "0.7071067811865476+0i,0.7071067811865476+0i", {},
       "state for the tomo subcommand"},
      {"tomography.peak_rabi", K::kFrequency, "250khz", {}, "square pulse Rabi limit"},
      {"tomography.per_window_gains", K::kBool, "true", {}, "calibrate one gain per window"},
      {"tomography.calibration_shots", K::kCount, "10", {}, "shots per calibration state"},
      {"tomography.repeats", K::kCount, "3", {}, "repeats per state"},
      {"tomography.fid_span", K::kTime, "3us", {}, "length of the w1 and w3 windows"},
      {"tomography.min_pulse_slot", K::kTime, "2us", {}, "pulse slot assumed when placing FID windows"},
      {"tomography.echo_lead", K::kTime, "18us", {}, "w2 opens this long before the readout pulse"},
      {"tomography.echo_gap", K::kTime, "1us", {}, "w2 closes this long before the readout pulse"},
      {"interactions.shift_ref", K::kFrequency, "1ghz", {}, "shift at r_ref"},
      {"interactions.r_ref", K::kLength, "2.5nm", {}, "reference distance"},
      {"interactions.mean_separation", K::kLength, "2.5nm", {}, "mean dopant separation"},
      {"interactions.spectral_fraction", K::kReal, "1e-6", {}, "fraction of dopants in the perturber spike"},
      {"interactions.excited_fraction", K::kReal, "1", {}, "fraction of perturbers excited"},
      {"interactions.orientation", K::kChoice, "dipolar", {"dipolar", "isotropic"}, "angular kernel"},
      {"interactions.n_targets", K::kCount, "100000", {}, "targets for the shift distribution"},
      {"interactions.n_perturbers", K::kCount, "64", {}, "perturbers per target"},
      {"interactions.tau_min", K::kTime, "5us", {}, "first echo delay"},
      {"interactions.tau_max", K::kTime, "400us", {}, "last echo delay"},
      {"interactions.tau_count", K::kCount, "40", {}, "echo delays"},
      {"interactions.hard_pulses", K::kBool, "true", {}, "instantaneous echo pulses"},
      {"interactions.peak_rabi", K::kFrequency, "250khz", {}, "Rabi frequency of finite echo pulses"},
      {"interactions.perturber_offset", K::kFrequency, "5mhz", {}, "perturber spike offset (metadata)"},
  };
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : config_schema()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

/// Leading number and the (trimmed, lowercased) remainder.
bool split_number(const std::string& text, double& value, std::string& unit) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || !std::isfinite(value)) return false;
  unit = lower(trim(std::string(res.ptr, last)));
  return true;
}

double unit_factor(ValueKind kind, const std::string& unit, const std::string& key) {
  struct U {
    const char* name;
    double factor;
  };
  static const U freq[] = {{"hz", 1.0}, {"khz", 1e3}, {"mhz", 1e6}, {"ghz", 1e9}};
  static const U time[] = {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}};
  static const U length[] = {{"nm", 1.0}, {"um", 1e3}};
  auto lookup = [&](auto& table, const char* expect) {
    for (const U& u : table) {
      if (unit == u.name) return u.factor;
    }
    throw ConfigError("key '" + key + "' needs a unit suffix (" + expect + "), got '" + unit + "'");
  };
  switch (kind) {
    case K::kFrequency:
      return lookup(freq, "hz, khz, mhz, ghz");
    case K::kTime:
      return lookup(time, "s, ms, us, ns");
    case K::kLength:
      return lookup(length, "nm, um");
    default:
      if (!unit.empty()) throw ConfigError("key '" + key + "' takes no unit, got '" + unit + "'");
      return 1.0;
  }
}

double decode_number(const KeySpec& spec, const std::string& text) {
  double v = 0.0;
  std::string unit;
  if (!split_number(text, v, unit)) {
    throw ConfigError("key '" + spec.key + "' expects a number, got '" + text + "'");
  }
  return v * unit_factor(spec.kind, unit, spec.key);
}

std::uint64_t decode_count(const KeySpec& spec, const std::string& text) {
  std::uint64_t n = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), n);
  if (res.ec == std::errc() && res.ptr == text.data() + text.size()) return n;
  const double v = decode_number(spec, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9007199254740992.0) {
    throw ConfigError("key '" + spec.key + "' expects a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

bool decode_bool(const KeySpec& spec, const std::string& text) {
  const std::string t = lower(text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError("key '" + spec.key + "' expects true or false, got '" + text + "'");
}

void check_value(const KeySpec& spec, const std::string& text) {
  switch (spec.kind) {
    case K::kFrequency:
    case K::kTime:
    case K::kLength:
    case K::kReal:
      decode_number(spec, text);
      break;
    case K::kCount:
      decode_count(spec, text);
      break;
    case K::kBool:
      decode_bool(spec, text);
      break;
    case K::kChoice:
      if (std::find(spec.choices.begin(), spec.choices.end(), lower(unquote(text))) ==
          spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
        throw ConfigError("key '" + spec.key + "' must be one of " + allowed + ", got '" + text + "'");
      }
      break;
    case K::kText:
      break;
  }
}

const KeySpec& require_key(const std::string& key) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("unknown key '" + key + "'");
  return *spec;
}

}  // namespace

const std::vector<KeySpec>& config_schema() {
  static const std::vector<KeySpec> schema = build_schema();
  return schema;
}

ExperimentConfig::ExperimentConfig() {
  for (const auto& k : config_schema()) values_[k.key] = k.default_text;
}

void ExperimentConfig::set(const std::string& key, const std::string& value_text) {
  const KeySpec& spec = require_key(key);
  const std::string v = trim(value_text);
  check_value(spec, v);
  values_[key] = spec.kind == K::kChoice ? lower(unquote(v)) : v;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::map<std::string, std::size_t> seen;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const std::string where = source + ":" + std::to_string(n);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    const std::string value = trim(line.substr(eq + 1));
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where + ": key '" + key + "' already set on line " + std::to_string(it->second));
    }
    seen[key] = n;
    try {
      c.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

double ExperimentConfig::number(const std::string& key) const {
  return decode_number(require_key(key), values_.at(key));
}

std::uint64_t ExperimentConfig::count(const std::string& key) const {
  return decode_count(require_key(key), values_.at(key));
}

bool ExperimentConfig::flag(const std::string& key) const {
  return decode_bool(require_key(key), values_.at(key));
}

const std::string& ExperimentConfig::text(const std::string& key) const {
  require_key(key);
  return values_.at(key);
}

std::string ExperimentConfig::resolved_text() const {
  std::string out;
  for (const auto& k : config_schema()) out += k.key + " = " + values_.at(k.key) + "\n";
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : resolved_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  try {
    eqt::validate(raw_ensemble_spec(*this));
    eqt::validate(sampled_spike_spec(*this));
    eqt::validate(preparation_plan(*this));
    eqt::validate(noise_model(*this));
    eqt::validate(interaction_model(*this));
    parse_state(unquote(text("tomography.state")));
    tau_grid(*this);
    if (!(number("detection.sample_interval") > 0.0)) {
      throw ParameterError("detection.sample_interval must be > 0");
    }
    if (!(number("detection.emission_scale") > 0.0)) {
      throw ParameterError("detection.emission_scale must be > 0");
    }
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

EnsembleSpec raw_ensemble_spec(const ExperimentConfig& c) {
  EnsembleSpec s;
  s.n_ions = c.count("ensemble.n_ions");
  s.detuning_profile = profile::Rectangular{angular(c.number("ensemble.width"))};
  s.rabi_spread = c.number("ensemble.rabi_spread");
  s.nominal_rabi = angular(c.number("ensemble.nominal_rabi"));
  s.seed = c.seed();
  return s;
}

EnsembleSpec sampled_spike_spec(const ExperimentConfig& c) {
  EnsembleSpec s = raw_ensemble_spec(c);
  s.n_ions = c.count("spike.n_ions");
  s.detuning_profile = profile::Rectangular{angular(c.number("spike.width"))};
  s.rabi_spread = c.number("spike.rabi_spread");
  return s;
}

PreparationPlan preparation_plan(const ExperimentConfig& c) {
  PreparationPlan p;
  p.trench_width = angular(c.number("prep.trench_width"));
  p.trench_residual = c.number("prep.trench_residual");
  p.repump_rf_center_hz = c.number("prep.repump_rf_center");
  p.repump_rf_half_width_hz = c.number("prep.repump_rf_half_width");
  p.aux_offset_hz = c.number("prep.aux_offset");
  p.antihole_fwhm = angular(c.number("prep.antihole_fwhm"));
  p.narrowing.band_outer = angular(c.number("prep.narrowing.band_outer"));
  p.narrowing.band_inner = angular(c.number("prep.narrowing.band_inner"));
  p.narrowing.duration = c.number("prep.narrowing.duration");
  p.narrowing.n_rounds = c.count("prep.narrowing.n_rounds");
  p.narrowing.synthesis.peak_rabi = angular(c.number("prep.narrowing.peak_rabi"));
  p.rabi_select.pulse_duration = c.number("prep.rabi_select.pulse_duration");
  p.rabi_select.n_pulses = c.count("prep.rabi_select.n_pulses");
  p.rabi_select.inter_pulse_delay = c.number("prep.rabi_select.inter_pulse_delay");
  p.branching = {c.number("prep.branching.half"), c.number("prep.branching.three_half"),
                 c.number("prep.branching.five_half")};
  return p;
}

NoiseModel noise_model(const ExperimentConfig& c) {
  return {c.number("noise.shot_scale_jitter"), c.number("noise.additive_noise_rms")};
}

TomographySetup tomography_setup(const ExperimentConfig& c, std::size_t workers) {
  TomographySetup s;
  s.noise = noise_model(c);
  s.trace.sample_interval = c.number("detection.sample_interval");
  s.trace.recovery_time = c.number("detection.recovery_time");
  s.trace.emission_scale = c.number("detection.emission_scale");
  s.trace.seed = c.seed();
  s.trace.workers = workers;
  s.layout.recovery_time = s.trace.recovery_time;
  s.layout.fid_span = c.number("tomography.fid_span");
  s.layout.min_pulse_slot = c.number("tomography.min_pulse_slot");
  s.layout.echo_lead = c.number("tomography.echo_lead");
  s.layout.echo_gap = c.number("tomography.echo_gap");
  s.peak_rabi = angular(c.number("tomography.peak_rabi"));
  s.per_window_gains = c.flag("tomography.per_window_gains");
  s.calibration_shots = c.count("tomography.calibration_shots");
  s.repeats = c.count("tomography.repeats");
  return s;
}

InteractionModel interaction_model(const ExperimentConfig& c) {
  InteractionModel m;
  m.shift_ref_hz = c.number("interactions.shift_ref");
  m.r_ref_nm = c.number("interactions.r_ref");
  m.excited_fraction = c.number("interactions.excited_fraction");
  const double fraction = c.number("interactions.spectral_fraction");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ParameterError("interactions.spectral_fraction must lie in (0, 1]");
  }
  m.perturber_density = density_from_separation(c.number("interactions.mean_separation"), fraction);
  m.orientation = c.text("interactions.orientation") == "isotropic" ? Orientation::kIsotropic
                                                                    : Orientation::kDipolar;
  return m;
}

EchoExperiment echo_experiment(const ExperimentConfig& c) {
  EchoExperiment x;
  x.hard_pulses = c.flag("interactions.hard_pulses");
  x.peak_rabi = angular(c.number("interactions.peak_rabi"));
  x.perturber_offset_hz = c.number("interactions.perturber_offset");
  return x;
}

std::vector<double> tau_grid(const ExperimentConfig& c) {
  const double lo = c.number("interactions.tau_min");
  const double hi = c.number("interactions.tau_max");
  const std::uint64_t n = c.count("interactions.tau_count");
  if (!(lo > 0.0) || n < 1 || (n > 1 && !(hi > lo))) {
    throw ParameterError("interactions tau grid needs 0 < tau_min < tau_max and tau_count >= 1");
  }
  std::vector<double> grid;
  for (std::uint64_t k = 0; k < n; ++k) {
    grid.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  return grid;
}

namespace {

std::complex<double> parse_complex(const std::string& raw) {
  std::string s;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  }
  auto fail = [&]() -> std::complex<double> {
    throw ConfigError("cannot parse complex amplitude '" + raw + "' (expected re+imi)");
  };
  if (s.empty()) return fail();
  const char* p = s.data();
  const char* end = p + s.size();
  auto read = [&](double& v) {
    if (p != end && *p == '+') ++p;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) return false;
    p = res.ptr;
    return true;
  };
  double a = 0.0;
  if (!read(a)) return fail();
  if (p != end && *p == 'i') return ++p == end ? std::complex<double>(0.0, a) : fail();
  if (p == end) return {a, 0.0};
  double b = 0.0;
  if (!read(b) || p == end || *p != 'i' || p + 1 != end) return fail();
  return {a, b};
}

}  // namespace

TargetState parse_state(const std::string& text, double* correction) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("state '" + text + "' needs two amplitudes");
  try {
    return TargetState::normalized(parse_complex(text.substr(0, comma)),
                                   parse_complex(text.substr(comma + 1)), correction);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("state '") + text + "': " + e.what());
  }
}

}  // namespace eqt
