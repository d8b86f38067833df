// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "eqt/config.hpp"
#include "eqt/detection.hpp"
#include "eqt/dynamics.hpp"
#include "eqt/ensemble.hpp"
#include "eqt/histogram.hpp"
#include "eqt/interactions.hpp"
#include "eqt/random.hpp"
#include "eqt/runner.hpp"
#include "eqt/spectral_prep.hpp"
#include "eqt/tomography.hpp"

using namespace eqt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

IonEnsemble single_resonant_ion() {
  IonEnsemble e;
  e.ions.resize(1);
  return e;
}

/// 10^4 ions, 50 kHz rectangular line, 10% Rabi spread.
IonEnsemble sampled_spike(double rabi_spread = 0.1) {
  EnsembleSpec spec;
  spec.n_ions = 10000;
  spec.detuning_profile = profile::Rectangular{kHz(50.0)};
  spec.rabi_spread = rabi_spread;
  spec.seed = 17;
  return sample_ensemble(spec);
}

TomographySetup quiet_setup() {
  TomographySetup s;
  s.noise = {0.0, 0.0};
  return s;
}

// 1 ---------------------------------------------------------------------------
Outcome sign_rules() {
  const IonEnsemble ion = single_resonant_ion();
  const TomographySetup setup = quiet_setup();
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const TargetState s = haar_random_state(2024, k);
    const BlochVector b = state_to_bloch(s);
    const RawWindows raw = run_tomography(ion, s, setup, k).raw;
    const double expect[3][2] = {{-b.x, b.y}, {b.x, b.y}, {-b.z, b.y}};
    for (int w = 0; w < 3; ++w) {
      worst = std::max({worst, std::abs(raw[w].i - expect[w][0]), std::abs(raw[w].q - expect[w][1])});
    }
  }
  return {worst < 1e-6, "max deviation " + fmt("%.2e", worst) + " over 100 Haar states"};
}

// 2 ---------------------------------------------------------------------------
Outcome round_trip() {
  const IonEnsemble ion = single_resonant_ion();
  const TomographySetup quiet = quiet_setup();
  const ScaleCalibration unit = calibrate(ion, quiet);
  double ideal_err = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const TargetState s = haar_random_state(7, k);
    const BlochEstimate e = estimate_bloch(run_tomography(ion, s, quiet, k).raw, unit);
    ideal_err = std::max(ideal_err, distance(e.r, state_to_bloch(s)));
  }

  TomographySetup noisy;  // 10% shot jitter, per-window calibration, worst of 3
  const FidelityReport r = table1_experiment(sampled_spike(), noisy);
  double worst_raw = 1.0;
  double mean_raw = 0.0;
  bool normalized_ok = true;
  for (const StateResult& s : r.states) {
    worst_raw = std::min(worst_raw, s.worst_raw_fidelity);
    mean_raw += s.worst_raw_fidelity;
    for (const RepeatResult& rep : s.repeats) {
      if (rep.estimate.r.norm() < 1.0 && rep.normalized_fidelity < rep.raw_fidelity) {
        normalized_ok = false;
      }
    }
  }
  mean_raw /= static_cast<double>(r.states.size());
  const bool pass = ideal_err < 1e-6 && worst_raw >= 0.80 && mean_raw > 0.90 && normalized_ok;
  return {pass, "ideal error " + fmt("%.2e", ideal_err) + "; raw worst " + fmt("%.3f", worst_raw) +
                    " mean " + fmt("%.3f", mean_raw) +
                    (normalized_ok ? "; normalized >= raw" : "; normalized < raw in some row")};
}

// 3 ---------------------------------------------------------------------------
Outcome fid_shape() {
  const IonEnsemble e = sampled_spike();
  Timeline tl(60e-6);
  tl.add(0.0, square_pulse(kPi / 2, 1e-6, 0.0));
  TraceOptions o;
  o.recovery_time = 0.0;
  const IQTrace t = synthesize_trace(e, tl, {0.0, 0.0}, o);
  double zero = -1.0;
  for (std::size_t j = 1; j < t.size(); ++j) {
    if (t.blanked[j - 1] || t.blanked[j]) continue;
    if (t.i[j - 1] < 0.0 && t.i[j] >= 0.0) {
      zero = t.t[j - 1] + (t.t[j] - t.t[j - 1]) * (-t.i[j - 1]) / (t.i[j] - t.i[j - 1]);
      break;
    }
  }
  return {zero > 0.0 && std::abs(zero - 20e-6) <= 0.05 * 20e-6,
          "first zero at " + fmt("%.2f", zero * 1e6) + " us after the pulse start"};
}

// 4 ---------------------------------------------------------------------------
Outcome normalization() {
  const IonEnsemble e = sampled_spike();
  const TomographySetup base;
  const ScaleCalibration cal = calibrate(e, base);
  double worst = 0.0;
  std::uint64_t shot = 100;
  for (const NamedState& s : table1_states()) {
    ++shot;
    const BlochEstimate ref = estimate_bloch(run_tomography(e, s.state, base, shot).raw, cal);
    const double f_ref = fidelity(s.state, ref, true);
    for (double c : {0.5, 0.9, 2.0}) {
      TomographySetup scaled = base;
      scaled.trace.emission_scale = c * base.trace.emission_scale;
      const BlochEstimate est = estimate_bloch(run_tomography(e, s.state, scaled, shot).raw, cal);
      worst = std::max(worst, std::abs(fidelity(s.state, est, true) - f_ref));
    }
  }
  return {worst < 1e-10, "max normalized-fidelity change " + fmt("%.2e", worst)};
}

// 5 ---------------------------------------------------------------------------
Outcome echo_theorem() {
  InteractionModel model;
  model.perturber_density = density_from_separation(2.5, 1e-6);
  const std::vector<double> shifts = sample_shifts(model, 100000, 64, 5);
  const double hwhm = sample_hwhm(shifts);
  EchoExperiment x;
  x.tau = 200e-6;
  auto amp = [&](const IonEnsemble& e, PerturbTiming t) {
    EchoExperiment y = x;
    y.timing = t;
    return run_echo(e, y, shifts);
  };
  // Perfect pulses: the theorem itself.
  const IonEnsemble ideal = sampled_spike(0.0);
  const double none_i = amp(ideal, PerturbTiming::kNone);
  const double before_i = std::abs(amp(ideal, PerturbTiming::kBeforeHalf) / none_i - 1.0);
  const double half_i = std::abs(amp(ideal, PerturbTiming::kAfterHalf) / none_i - 1.0);
  const double pi_i = amp(ideal, PerturbTiming::kAfterPi) / none_i;
  // 10% Rabi spread: pulse errors leave some shift-dependent signal.
  const IonEnsemble real = sampled_spike(0.1);
  const double none_r = amp(real, PerturbTiming::kNone);
  const double half_r = std::abs(amp(real, PerturbTiming::kAfterHalf) / none_r - 1.0);
  const double pi_r = amp(real, PerturbTiming::kAfterPi) / none_r;
  const bool pass = before_i < 1e-6 && half_i < 0.05 && half_r < 0.05 && pi_i < 0.5 && pi_r < 0.5;
  return {pass, "shift HWHM " + fmt("%.0f", hwhm) + " Hz; ideal pulses: before " +
                    fmt("%.1e", before_i) + ", after_half " + fmt("%.1e", half_i) +
                    ", after_pi ratio " + fmt("%.3f", pi_i) + "; 10% Rabi spread: after_half " +
                    fmt("%.1e", half_r) + ", after_pi ratio " + fmt("%.3f", pi_r)};
}

// 6 ---------------------------------------------------------------------------
Outcome shift_arithmetic() {
  InteractionModel model;
  model.perturber_density = density_from_separation(2.5, 1e-6);
  const std::vector<double> shifts = sample_shifts(model, 100000, 64, 6);
  const double hwhm = sample_hwhm(shifts);
  double worst = 0.0;
  for (std::uint64_t target = 0; target < 1000; ++target) {
    const auto pos = sample_perturbers(model, 64, 6, target);
    double magnitude = 0.0;
    for (const Position& p : pos) magnitude += std::abs(shift_from_positions(model, {&p, 1}));
    const double base = shift_from_positions(model, pos);
    for (double lambda : {0.37, 3.1, 10.0}) {
      std::vector<Position> scaled = pos;
      for (Position& p : scaled) p = {p.x * lambda, p.y * lambda, p.z * lambda};
      const double s = shift_from_positions(model, scaled) * lambda * lambda * lambda;
      worst = std::max(worst, std::abs(s - base) / magnitude);
    }
  }
  const bool pass = hwhm >= 1000.0 / 3.0 && hwhm <= 3000.0 && worst <= 1e-12;
  return {pass, "HWHM " + fmt("%.0f", hwhm) + " Hz (10^5 targets x 64); lambda^-3 deviation " +
                    fmt("%.1e", worst)};
}

// 7, 8 ------------------------------------------------------------------------
struct PrepStages {
  IonEnsemble narrowed;
  double narrowing_seconds = 0.0;
  double pipeline_seconds = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const ExperimentConfig& default_config() {
  static const ExperimentConfig c;
  return c;
}

PrepStages& prep_stages() {
  static PrepStages s = [] {
    PrepStages p;
    const auto t0 = std::chrono::steady_clock::now();
    const EnsembleSpec raw = raw_ensemble_spec(default_config());
    const PreparationPlan plan = preparation_plan(default_config());
    p.narrowed = sample_ensemble(raw);
    burn_trench(p.narrowed, plan, raw.seed);
    repump_antihole(p.narrowed, plan, raw.seed);
    const auto t1 = std::chrono::steady_clock::now();
    apply_narrowing(p.narrowed, plan, raw.seed);
    p.narrowing_seconds = seconds_since(t1);
    p.pipeline_seconds = seconds_since(t0);
    return p;
  }();
  return s;
}

Outcome narrowing_contract() {
  const PrepStages& p = prep_stages();
  const FeatureShape f = feature_shape(p.narrowed);
  const bool pass = std::abs(f.width_10_hz - 50e3) <= 0.2 * 50e3 && f.rectangularity > 0.8;
  return {pass, "width at 10% " + fmt("%.1f", f.width_10_hz * 1e-3) + " kHz, FWHM " +
                    fmt("%.1f", f.fwhm_hz * 1e-3) + " kHz, rectangularity " +
                    fmt("%.3f", f.rectangularity) + "; " + std::to_string(p.narrowed.active_count()) +
                    " active ions; narrowing " + fmt("%.1f", p.narrowing_seconds) + " s"};
}

Outcome rabi_selection() {
  const PrepStages& p = prep_stages();
  IonEnsemble e = p.narrowed;
  const PreparationPlan plan = preparation_plan(default_config());
  const auto t0 = std::chrono::steady_clock::now();
  rabi_postselect(e, plan, default_config().seed());
  const double hw = rabi_half_width(e);
  const double total = p.pipeline_seconds + seconds_since(t0);
  const bool pass = hw >= 0.05 && hw <= 0.20 && total < 60.0;
  return {pass, "rabi_scale half width " + fmt("%.3f", hw) + " over " +
                    std::to_string(e.active_count()) + " survivors; full pipeline " +
                    fmt("%.1f", total) + " s"};
}

// 9 ---------------------------------------------------------------------------
Outcome dynamics_suite() {
  RandomStream rng(99, StreamPurpose::kStates, 0);
  auto unit = [&] {
    const double z = rng.uniform(-1.0, 1.0);
    const double ph = rng.uniform(0.0, kTwoPi);
    const double s = std::sqrt(1.0 - z * z);
    return BlochVector{s * std::cos(ph), s * std::sin(ph), z};
  };
  // Norm through full timelines with shaped and square pulses.
  Timeline tl(200e-6);
  tl.add(0.0, PulseEnvelope::sinc_diff({2e6, 1e6, 4e5, 2e5}, 20e-6, 0.3));
  tl.add(70e-6, square_pulse(kPi, 2e-6, 0.0));
  tl.add(140e-6, square_pulse(kPi / 2, 1e-6, 0.0));
  const TimelinePropagator prop(tl, kHz(500.0), 1.5);
  double norm_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const BlochVector b = prop.evolve(unit(), rng.uniform(-kHz(500), kHz(500)),
                                      rng.uniform(0.5, 1.5), 200e-6);
    norm_err = std::max(norm_err, std::abs(b.norm() - 1.0));
  }
  // Echo conjugation.
  double conj_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const BlochVector b0 = unit();
    const double det = rng.uniform(-MHz(1.0), MHz(1.0));
    const double tau = rng.uniform(0.0, 1e-3);
    const BlochVector b = free_evolve(rotate(free_evolve(b0, det, tau), 0.0, kPi), det, tau);
    conj_err = std::max({conj_err, std::abs(b.x + b0.x), std::abs(b.y - b0.y)});
  }
  // Self-convergence at the default step count.
  const PulseEnvelope shaped = tl.events()[0].pulse;
  double conv_err = 0.0;
  for (double det : {0.0, kHz(100.0), -kHz(400.0)}) {
    const std::size_t n = shaped_step_count(shaped, std::hypot(shaped.peak(), det));
    conv_err = std::max(conv_err,
                        distance(propagate_shaped_steps(BlochVector::ground(), shaped, det, 1.0, n),
                                 propagate_shaped_steps(BlochVector::ground(), shaped, det, 1.0, 2 * n)));
  }
  // Half excitation at detuning = Rabi, exact and integrated.
  const double rabi = kHz(250.0);
  const double t_half = kPi / (std::sqrt(2.0) * rabi);
  const double p_exact =
      0.5 * (1.0 + propagate_const(BlochVector::ground(), rabi, 0.0, rabi, t_half).z);
  const double p_rk4 = excitation_probability(PulseEnvelope::tabulated({rabi, rabi}, t_half, 0.0), rabi);
  const double half_err = std::max(std::abs(p_exact - 0.5), std::abs(p_rk4 - 0.5));
  const bool pass = norm_err < 1e-9 && conj_err < 1e-12 && conv_err < 1e-8 && half_err < 1e-8;
  return {pass, "norm " + fmt("%.1e", norm_err) + ", conjugation " + fmt("%.1e", conj_err) +
                    ", convergence " + fmt("%.1e", conv_err) + ", half excitation " +
                    fmt("%.1e", half_err)};
}

// 10 --------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "eqt_acceptance_determinism";
  fs::remove_all(root);
  ExperimentConfig prepared;
  prepared.set("seed", "31");
  ExperimentConfig sampled = prepared;
  sampled.set("spike.source", "sampled");
  sampled.set("interactions.n_targets", "20000");
  sampled.set("interactions.tau_count", "8");

  struct Case {
    Command command;
    const ExperimentConfig* config;
    const char* tag;
  };
  const Case cases[] = {
      {Command::kPrepare, &prepared, "prepare"},  {Command::kTable1, &prepared, "table1-prepared"},
      {Command::kTomo, &sampled, "tomo"},         {Command::kTable1, &sampled, "table1"},
      {Command::kEcho, &sampled, "echo"},         {Command::kShifts, &sampled, "shifts"},
  };
  std::ostringstream log;
  std::size_t files = 0;
  std::string mismatch;
  for (const Case& c : cases) {
    RunOptions first;
    first.out_dir = root / (std::string(c.tag) + "-w1");
    first.workers = 1;
    run_command(c.command, *c.config, first, log);
    const Manifest m = load_manifest(first.out_dir / "manifest.json");
    RunOptions again;
    again.out_dir = root / (std::string(c.tag) + "-w3");
    again.workers = 3;
    again.state = m.state;
    run_command(m.command, m.config, again, log);
    for (const auto& entry : fs::directory_iterator(first.out_dir)) {
      ++files;
      const fs::path other = again.out_dir / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
        mismatch += " " + std::string(c.tag) + "/" + entry.path().filename().string();
      }
    }
  }
  fs::remove_all(root);
  return {mismatch.empty() && files > 0,
          std::to_string(files) + " files compared across 6 manifest reruns (1 vs 3 workers)" +
              (mismatch.empty() ? "" : "; differing:" + mismatch)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "sign rules", 10, sign_rules},
      {2, "round-trip tomography", 300, round_trip},
      {3, "FID shape", 30, fid_shape},
      {4, "normalization insensitivity", 0, normalization},
      {5, "echo rephasing", 120, echo_theorem},
      {6, "shift arithmetic", 120, shift_arithmetic},
      {7, "narrowing contract", 120, narrowing_contract},
      {8, "Rabi post-selection", 60, rabi_selection},
      {9, "dynamics properties", 10, dynamics_suite},
      {10, "determinism", 0, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s = seconds_since(t0);
    const bool in_time = c.budget_s == 0.0 || s < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %2d %-28s %s [%.1f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), s,
                in_time ? "" : (", budget " + fmt("%.0f", c.budget_s) + " s exceeded").c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
