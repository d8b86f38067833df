#include "eqt/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "eqt/csv.hpp"
#include "eqt/error.hpp"
#include "eqt/histogram.hpp"

#ifndef EQT_VERSION
#define EQT_VERSION "0.0.0"
#endif

namespace eqt {

namespace fs = std::filesystem;

std::string to_string(Command c) {
  switch (c) {
    case Command::kPrepare:
      return "prepare";
    case Command::kTomo:
      return "tomo";
    case Command::kTable1:
      return "table1";
    case Command::kEcho:
      return "echo";
    case Command::kShifts:
      return "shifts";
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::kPrepare, Command::kTomo, Command::kTable1, Command::kEcho,
                    Command::kShifts}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown command '" + name + "'");
}

namespace {

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) const {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    return out;
  }
  void write(const std::string& name, const std::string& text) const { open(name) << text; }

 private:
  fs::path dir_;
};

std::string state_label(const TargetState& s) {
  auto amp = [](std::complex<double> c) {
    return format_double(c.real()) + (c.imag() < 0.0 ? "" : "+") +
           format_double(c.imag()) + "i";
  };
  return amp(s.alpha()) + "," + amp(s.beta());
}

nlohmann::json bloch_json(const BlochVector& b) { return {b.x, b.y, b.z}; }

void run_prepare(const ExperimentConfig& c, const RunOptions& o, const OutputDir& out,
                 std::ostream& log) {
  const PreparationPlan plan = preparation_plan(c);
  PreparedEnsemble prepared = prepare(raw_ensemble_spec(c), plan, o.workers);
  const auto& r = prepared.report;
  log << "prepare: " << r.initial << " -> " << r.after_trench << " -> " << r.after_repump << " -> "
      << r.after_narrowing << " -> " << r.after_rabi_select << " active ions\n";
  out.write("prepare_report.json", r.to_json(plan) + "\n");
  {
    auto f = out.open("spectrum.csv");
    write_spectrum_csv(f, r.spectrum);
  }
  {
    auto f = out.open("rabi_scale.csv");
    CsvWriter csv(f, {"rabi_scale", "density"});
    const auto d = r.rabi.density();
    for (std::size_t i = 0; i < r.rabi.bins(); ++i) csv.row({r.rabi.center(i), d[i]});
  }
}

void run_tomo(const ExperimentConfig& c, const RunOptions& o, const OutputDir& out,
              std::ostream& log) {
  double correction = 0.0;
  const std::string spec = o.state ? *o.state : c.text("tomography.state");
  const TargetState state = parse_state(spec, &correction);
  if (correction > 1e-6) {
    log << "warning: state '" << spec << "' renormalized (norm^2 off by " << correction << ")\n";
  }
  const IonEnsemble spike = spike_ensemble(c, o.workers);
  const TomographySetup setup = tomography_setup(c, o.workers);
  const ScaleCalibration cal = calibrate(spike, setup);
  const TomographyRun run = run_tomography(spike, state, setup, 0);
  const BlochEstimate est = estimate_bloch(run.raw, cal);
  {
    auto f = out.open("trace.csv");
    write_trace_csv(f, run.trace);
  }
  nlohmann::json j;
  j["state"] = state_label(state);
  j["target_bloch"] = bloch_json(state_to_bloch(state));
  j["active_ions"] = spike.active_count();
  j["trace_scale"] = run.trace.scale;
  j["windows_us"] = nlohmann::json::array();
  j["window_means"] = nlohmann::json::array();
  for (std::size_t k = 0; k < 3; ++k) {
    j["windows_us"].push_back({run.windows.w[k].start * 1e6, run.windows.w[k].end * 1e6});
    j["window_means"].push_back({run.raw[k].i, run.raw[k].q});
  }
  j["calibration"] = {{"scale", cal.scale}, {"gains", cal.gains}};
  j["bloch_estimate"] = bloch_json(est.r);
  j["residual"] = est.residual;
  j["raw_fidelity"] = fidelity(state, est, false);
  if (est.r.norm() >= 1e-6) j["normalized_fidelity"] = fidelity(state, est, true);
  out.write("tomo_report.json", j.dump(2) + "\n");
  log << "tomo: estimate " << est.r << ", raw fidelity " << fidelity(state, est, false) << "\n";
}

void run_table1(const ExperimentConfig& c, const RunOptions& o, const OutputDir& out,
                std::ostream& log) {
  const IonEnsemble spike = spike_ensemble(c, o.workers);
  const FidelityReport report = table1_experiment(spike, tomography_setup(c, o.workers));
  out.write("table1.json", report.to_json() + "\n");
  auto f = out.open("table1.csv");
  report.write_csv(f);
  for (const auto& s : report.states) {
    log << "  " << s.target.label << "  raw " << s.worst_raw_fidelity << "  pure "
        << s.worst_normalized_fidelity << "\n";
  }
}

std::vector<double> config_shifts(const ExperimentConfig& c, std::size_t workers) {
  return sample_shifts(interaction_model(c), c.count("interactions.n_targets"),
                       c.count("interactions.n_perturbers"), c.seed(), workers);
}

nlohmann::json model_json(const ExperimentConfig& c, std::span<const double> shifts) {
  const InteractionModel m = interaction_model(c);
  return {{"coupling_hz_nm3", m.coupling()},
          {"perturber_density_per_nm3", m.perturber_density},
          {"excited_fraction", m.excited_fraction},
          {"orientation", to_string(m.orientation)},
          {"sampling_radius_nm", sampling_radius(m, c.count("interactions.n_perturbers"))},
          {"shift_hwhm_hz", sample_hwhm(shifts)},
          {"shift_median_hz", median(std::vector<double>(shifts.begin(), shifts.end()))}};
}

void run_shifts(const ExperimentConfig& c, const RunOptions& o, const OutputDir& out,
                std::ostream& log) {
  const auto shifts = config_shifts(c, o.workers);
  const nlohmann::json j = model_json(c, shifts);
  out.write("shifts_report.json", j.dump(2) + "\n");
  auto f = out.open("shift_histogram.csv");
  write_shift_histogram_csv(f, shifts);
  log << "shifts: HWHM " << j["shift_hwhm_hz"].get<double>() << " Hz over " << shifts.size()
      << " targets\n";
}

void run_echo_curve(const ExperimentConfig& c, const RunOptions& o, const OutputDir& out,
                    std::ostream& log) {
  const IonEnsemble spike = spike_ensemble(c, o.workers);
  const auto shifts = config_shifts(c, o.workers);
  const auto grid = tau_grid(c);
  const EchoCurve curve = echo_curve(spike, shifts, grid, echo_experiment(c), o.workers);
  {
    auto f = out.open("echo_curve.csv");
    curve.write_csv(f);
  }
  nlohmann::json j = model_json(c, shifts);
  j["perturber_offset_hz"] = c.number("interactions.perturber_offset");
  j["hard_pulses"] = c.flag("interactions.hard_pulses");
  out.write("echo_report.json", j.dump(2) + "\n");
  log << "echo: " << grid.size() << " delays, amp_after_pi/amp_none at last delay "
      << curve.after_pi.back() / curve.none.back() << "\n";
}

}  // namespace

IonEnsemble spike_ensemble(const ExperimentConfig& c, std::size_t workers,
                           PreparationReport* report) {
  if (c.text("spike.source") == "sampled") return sample_ensemble(sampled_spike_spec(c), workers);
  PreparedEnsemble p = prepare(raw_ensemble_spec(c), preparation_plan(c), workers);
  if (report) *report = p.report;
  if (p.ensemble.empty()) throw EstimationError("preparation left no active ions");
  return std::move(p.ensemble);
}

void run_command(Command command, const ExperimentConfig& config, const RunOptions& options,
                 std::ostream& log) {
  config.validate();
  const OutputDir out(options.out_dir);
  out.write("config.resolved", config.resolved_text());

  nlohmann::json manifest{{"tool", "eqt"},
                          {"version", EQT_VERSION},
                          {"command", to_string(command)},
                          {"config_hash", config.hash()},
                          {"seed", config.seed()},
                          {"config", config.resolved_text()}};
  if (command == Command::kTomo && options.state) manifest["state"] = *options.state;
  out.write("manifest.json", manifest.dump(2) + "\n");

  switch (command) {
    case Command::kPrepare:
      run_prepare(config, options, out, log);
      break;
    case Command::kTomo:
      run_tomo(config, options, out, log);
      break;
    case Command::kTable1:
      run_table1(config, options, out, log);
      break;
    case Command::kEcho:
      run_echo_curve(config, options, out, log);
      break;
    case Command::kShifts:
      run_shifts(config, options, out, log);
      break;
  }
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read manifest '" + path.string() + "'");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    Manifest m;
    m.command = parse_command(j.at("command").get<std::string>());
    m.config = ExperimentConfig::parse(j.at("config").get<std::string>(), path.string());
    if (j.contains("state")) m.state = j.at("state").get<std::string>();
    if (j.contains("config_hash") && j.at("config_hash").get<std::string>() != m.config.hash()) {
      throw ConfigError("manifest config_hash does not match its embedded config");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + path.string() + "': " + e.what());
  }
}

}  // namespace eqt
