#include "eqt/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>
#include <json.hpp>

#include "eqt/csv.hpp"
#include "eqt/error.hpp"
#include "eqt/random.hpp"

namespace eqt {

namespace {

constexpr double kNormTolerance = 1e-12;

std::uint64_t shot_id(std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
  return (tag << 48) | (a << 24) | b;
}

}  // namespace

TargetState::TargetState(std::complex<double> alpha, std::complex<double> beta) {
  const double n = std::norm(alpha) + std::norm(beta);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
    throw ParameterError("target state is not normalized (|alpha|^2+|beta|^2 = " +
                         std::to_string(n) + ")");
  }
  // Remove the global phase so alpha is real and non-negative.
  if (std::abs(alpha) > 0.0) {
    const std::complex<double> g = std::conj(alpha) / std::abs(alpha);
    alpha *= g;
    beta *= g;
    alpha = {alpha.real(), 0.0};
  } else {
    beta = {std::abs(beta), 0.0};
  }
  alpha_ = alpha;
  beta_ = beta;
}

TargetState TargetState::normalized(std::complex<double> alpha, std::complex<double> beta,
                                    double* correction) {
  const double n = std::norm(alpha) + std::norm(beta);
  if (!(n > 0.0) || !std::isfinite(n)) throw ParameterError("target state has zero norm");
  if (correction) *correction = std::abs(n - 1.0);
  const double k = 1.0 / std::sqrt(n);
  return TargetState(alpha * k, beta * k);
}

BlochVector state_to_bloch(const TargetState& s) {
  const std::complex<double> c = 2.0 * std::conj(s.alpha()) * s.beta();
  return {c.real(), c.imag(), std::norm(s.beta()) - std::norm(s.alpha())};
}

PrepRotation prep_rotation_for_state(const TargetState& state) {
  const BlochVector r = state_to_bloch(state);
  PrepRotation p;
  p.area = std::acos(std::clamp(-r.z, -1.0, 1.0));
  p.phase = (std::hypot(r.x, r.y) > 0.0) ? std::atan2(-r.y, r.x) : 0.0;
  return p;
}

PulseEnvelope prep_pulse_for_state(const TargetState& state, double duration_per_area,
                                   double peak_rabi) {
  if (!(duration_per_area > 0.0)) throw ParameterError("duration_per_area must be > 0");
  const PrepRotation p = prep_rotation_for_state(state);
  if (p.area < 1e-12) return PulseEnvelope::square(0.0, 0.5 * kPi * duration_per_area, 0.0);
  return square_pulse(p.area, p.area * duration_per_area, p.phase, peak_rabi);
}

TargetState haar_random_state(std::uint64_t seed, std::uint64_t index) {
  RandomStream rng(seed, StreamPurpose::kStates, index);
  const double cos_theta = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, kTwoPi);
  const double a = std::sqrt(0.5 * (1.0 + cos_theta));
  const double b = std::sqrt(0.5 * (1.0 - cos_theta));
  return TargetState::normalized(a, std::polar(b, phi));
}

TomographyRun run_tomography(const IonEnsemble& ensemble, const TargetState& state,
                             const TomographySetup& setup, std::uint64_t shot) {
  TomographyRun run;
  run.timeline = tomography_timeline(
      prep_pulse_for_state(state, setup.duration_per_area, setup.peak_rabi), setup.peak_rabi);
  if (setup.windows) {
    run.windows = *setup.windows;
    check_windows(run.windows, run.timeline, setup.trace.recovery_time);
  } else {
    WindowLayout layout = setup.layout;
    layout.recovery_time = setup.trace.recovery_time;
    run.windows = default_windows(run.timeline, layout);
  }
  TraceOptions opts = setup.trace;
  opts.shot = shot;
  run.trace = synthesize_trace(ensemble, run.timeline, setup.noise, opts);
  for (std::size_t k = 0; k < 3; ++k) run.raw[k] = integrate_window(run.trace, run.windows.w[k]);
  return run;
}

ScaleCalibration uniform_calibration(double scale) {
  ScaleCalibration c;
  c.scale = scale;
  c.gains = {scale, scale, scale};
  return c;
}

ScaleCalibration calibrate(const IonEnsemble& ensemble, const TomographySetup& setup) {
  if (ensemble.active_count() == 0) throw CalibrationError("calibrate: no active ions");
  const std::size_t n = std::max<std::size_t>(setup.calibration_shots, 1);
  const TargetState ground(1.0, 0.0);
  const TargetState plus(std::sqrt(0.5), std::sqrt(0.5));
  ScaleCalibration c;
  std::array<double, 3> abs_i{};  // |I1|, |I2| from the plus state; |I3| from |0>
  for (std::size_t k = 0; k < n; ++k) {
    const RawWindows g = run_tomography(ensemble, ground, setup, shot_id(1, 0, k)).raw;
    const RawWindows p = run_tomography(ensemble, plus, setup, shot_id(2, 0, k)).raw;
    for (std::size_t w = 0; w < 3; ++w) {
      c.ground_mean[w].i += g[w].i / static_cast<double>(n);
      c.ground_mean[w].q += g[w].q / static_cast<double>(n);
      c.plus_mean[w].i += p[w].i / static_cast<double>(n);
      c.plus_mean[w].q += p[w].q / static_cast<double>(n);
    }
    abs_i[0] += std::abs(p[0].i) / static_cast<double>(n);
    abs_i[1] += std::abs(p[1].i) / static_cast<double>(n);
    abs_i[2] += std::abs(g[2].i) / static_cast<double>(n);
  }
  const double from_plus = 0.5 * (abs_i[0] + abs_i[1]);
  c.scale = 0.5 * (abs_i[2] + from_plus);
  const double floor = 1e-9 * setup.trace.emission_scale;
  if (!(abs_i[2] > floor) || !(from_plus > floor)) {
    throw CalibrationError("calibrate: calibration signal is indistinguishable from zero");
  }
  c.gains = setup.per_window_gains ? abs_i : std::array<double, 3>{c.scale, c.scale, c.scale};
  for (double g : c.gains) {
    if (!(g > floor)) throw CalibrationError("calibrate: a window gain is indistinguishable from zero");
  }
  return c;
}

BlochEstimate estimate_bloch(const RawWindows& raw, const ScaleCalibration& cal) {
  for (double g : cal.gains) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ParameterError("calibration gains must be > 0");
  }
  const auto [g1, g2, g3] = cal.gains;
  Eigen::Matrix<double, 6, 3> a;
  a << -g1, 0, 0,
       0, g1, 0,
       g2, 0, 0,
       0, g2, 0,
       0, 0, -g3,
       0, g3, 0;
  Eigen::Matrix<double, 6, 1> b;
  b << raw[0].i, raw[0].q, raw[1].i, raw[1].q, raw[2].i, raw[2].q;
  const Eigen::Vector3d r = a.colPivHouseholderQr().solve(b);

  BlochEstimate e;
  e.r = {r(0), r(1), r(2)};
  e.residual = (a * r - b).norm();
  e.scale = cal.scale;
  const double len = e.r.norm();
  e.r_normalized = len > 1e-6 ? e.r / len : BlochVector::zero();
  return e;
}

double fidelity(const TargetState& target, const BlochEstimate& est, bool assume_pure) {
  const BlochVector rt = state_to_bloch(target);
  BlochVector r = est.r;
  const double len = r.norm();
  if (assume_pure) {
    if (len < 1e-6) throw EstimationError("fidelity: estimate too short to normalize");
    r = r / len;
  } else if (len > 1.0) {
    r = r / len;
  }
  return std::clamp(0.5 * (1.0 + r.dot(rt)), 0.0, 1.0);
}

std::vector<NamedState> table1_states() {
  const double h = std::sqrt(0.5);
  const std::complex<double> i(0.0, 1.0);
  return {
      {"(|0>+i|1>)/sqrt2", TargetState(h, h * i)},
      {"(|0>+|1>)/sqrt2", TargetState(h, h)},
      {"|0>", TargetState(1.0, 0.0)},
      {"(|0>-|1>)/sqrt2", TargetState(h, -h)},
      {"|1>", TargetState(0.0, 1.0)},
      {"(|0>-i|1>)/sqrt2", TargetState(h, -h * i)},
      {"cos(0.960)|0>+sin(0.960)exp(2.60i)|1>",
       TargetState(std::cos(0.960), std::polar(std::sin(0.960), 2.60))},
  };
}

FidelityReport table1_experiment(const IonEnsemble& ensemble, const TomographySetup& setup,
                                 const std::vector<NamedState>& states) {
  FidelityReport report;
  report.calibration = calibrate(ensemble, setup);
  const std::size_t repeats = std::max<std::size_t>(setup.repeats, 1);
  for (std::size_t s = 0; s < states.size(); ++s) {
    StateResult res{states[s], {}, 1.0, 1.0};
    for (std::size_t k = 0; k < repeats; ++k) {
      RepeatResult rr;
      rr.raw = run_tomography(ensemble, states[s].state, setup, shot_id(3, s, k)).raw;
      rr.estimate = estimate_bloch(rr.raw, report.calibration);
      rr.raw_fidelity = fidelity(states[s].state, rr.estimate, false);
      rr.normalized_fidelity = fidelity(states[s].state, rr.estimate, true);
      res.worst_raw_fidelity = std::min(res.worst_raw_fidelity, rr.raw_fidelity);
      res.worst_normalized_fidelity = std::min(res.worst_normalized_fidelity, rr.normalized_fidelity);
      res.repeats.push_back(rr);
    }
    report.states.push_back(std::move(res));
  }
  return report;
}

std::string FidelityReport::to_json() const {
  auto windows = [](const RawWindows& w) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& m : w) j.push_back({m.i, m.q});
    return j;
  };
  nlohmann::json j;
  j["calibration"] = {{"scale", calibration.scale},
                      {"gains", calibration.gains},
                      {"ground_windows", windows(calibration.ground_mean)},
                      {"plus_windows", windows(calibration.plus_mean)}};
  j["states"] = nlohmann::json::array();
  for (const auto& s : states) {
    nlohmann::json js;
    js["label"] = s.target.label;
    js["target_amplitudes"] = {{s.target.state.alpha().real(), s.target.state.alpha().imag()},
                               {s.target.state.beta().real(), s.target.state.beta().imag()}};
    const BlochVector rt = state_to_bloch(s.target.state);
    js["target_bloch"] = {rt.x, rt.y, rt.z};
    js["worst_raw_fidelity"] = s.worst_raw_fidelity;
    js["worst_normalized_fidelity"] = s.worst_normalized_fidelity;
    js["repeats"] = nlohmann::json::array();
    for (const auto& r : s.repeats) {
      js["repeats"].push_back({{"bloch_estimate", {r.estimate.r.x, r.estimate.r.y, r.estimate.r.z}},
                               {"residual", r.estimate.residual},
                               {"windows", windows(r.raw)},
                               {"raw_fidelity", r.raw_fidelity},
                               {"normalized_fidelity", r.normalized_fidelity}});
    }
    j["states"].push_back(std::move(js));
  }
  return j.dump(2);
}

void FidelityReport::write_csv(std::ostream& os) const {
  CsvWriter csv(os, {"state", "fidelity", "fidelity_assuming_pure_state"});
  for (const auto& s : states) {
    csv.row(std::vector<std::string>{s.target.label, format_double(s.worst_raw_fidelity),
                                     format_double(s.worst_normalized_fidelity)});
  }
}

}  // namespace eqt
