#include "eqt/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "eqt/csv.hpp"
#include "eqt/dynamics.hpp"
#include "eqt/error.hpp"
#include "eqt/parallel.hpp"

namespace eqt {

std::string to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::kSquare:
      return "square";
    case PulseKind::kSincDiff:
      return "sinc_diff";
    case PulseKind::kTabulated:
      return "tabulated";
  }
  return "unknown";
}

double sinc(double u) {
  if (std::abs(u) < 1e-8) return 1.0 - (kPi * u) * (kPi * u) / 6.0;
  return std::sin(kPi * u) / (kPi * u);
}

namespace {

/// Composite Simpson rule on [0, T] with an even number of intervals.
template <class F>
double simpson(F&& f, double t_end, std::size_t intervals) {
  intervals += intervals % 2;
  const double h = t_end / static_cast<double>(intervals);
  double s = f(0.0) + f(t_end);
  for (std::size_t k = 1; k < intervals; ++k) {
    s += (k % 2 ? 4.0 : 2.0) * f(h * static_cast<double>(k));
  }
  return s * h / 3.0;
}

std::size_t quadrature_intervals(const PulseEnvelope& env) {
  std::size_t n = 20000;
  if (const auto* p = env.sinc_params()) {
    const double lobes = std::max(std::abs(p->b1), std::abs(p->b2)) * env.duration();
    n = std::max<std::size_t>(n, static_cast<std::size_t>(400.0 * lobes));
  } else if (const auto* s = env.samples()) {
    n = std::max<std::size_t>(n, 8 * s->size());
  }
  return n;
}

void check_duration(double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ParameterError("pulse duration must be finite and > 0");
  }
}

}  // namespace

PulseEnvelope::PulseEnvelope(Shape shape, double duration, double phase)
    : shape_(std::move(shape)), duration_(duration), phase_(phase) {
  check_duration(duration);
  if (!std::isfinite(phase)) throw ParameterError("pulse phase must be finite");
  if (const auto* sq = std::get_if<Square>(&shape_)) {
    peak_ = std::abs(sq->amplitude);
  } else if (const auto* samples = std::get_if<std::vector<double>>(&shape_)) {
    for (double v : *samples) peak_ = std::max(peak_, std::abs(v));
  } else {
    const std::size_t n = quadrature_intervals(*this);
    for (std::size_t k = 0; k <= n; ++k) {
      peak_ = std::max(peak_, std::abs(amplitude(duration_ * static_cast<double>(k) /
                                                 static_cast<double>(n))));
    }
    peak_ = std::max(peak_, std::abs(amplitude(0.5 * duration_)));
  }
}

PulseEnvelope PulseEnvelope::square(double amplitude, double duration, double phase) {
  if (!std::isfinite(amplitude)) throw ParameterError("square pulse amplitude must be finite");
  return PulseEnvelope(Square{amplitude}, duration, phase);
}

PulseEnvelope PulseEnvelope::sinc_diff(const SincDiffParams& params, double duration,
                                       double phase) {
  if (!(params.b1 > 0.0) || !(params.b2 > 0.0)) {
    throw ParameterError("sinc_diff: b1 and b2 must be > 0");
  }
  return PulseEnvelope(params, duration, phase);
}

PulseEnvelope PulseEnvelope::tabulated(std::vector<double> samples, double duration,
                                       double phase) {
  if (samples.size() < 2) throw ParameterError("tabulated pulse needs at least two samples");
  for (double v : samples) {
    if (!std::isfinite(v)) throw ParameterError("tabulated pulse sample is not finite");
  }
  return PulseEnvelope(std::move(samples), duration, phase);
}

PulseKind PulseEnvelope::kind() const {
  switch (shape_.index()) {
    case 0:
      return PulseKind::kSquare;
    case 1:
      return PulseKind::kSincDiff;
    default:
      return PulseKind::kTabulated;
  }
}

double PulseEnvelope::amplitude(double t) const {
  const double slack = 1e-12 * duration_;
  if (t < -slack || t > duration_ + slack) return 0.0;
  t = std::clamp(t, 0.0, duration_);
  if (const auto* sq = std::get_if<Square>(&shape_)) return sq->amplitude;
  if (const auto* p = std::get_if<SincDiffParams>(&shape_)) {
    const double u = t - 0.5 * duration_;
    return p->a1 * sinc(p->b1 * u) - p->a2 * sinc(p->b2 * u);
  }
  const auto& s = std::get<std::vector<double>>(shape_);
  const double pos = t / duration_ * static_cast<double>(s.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), s.size() - 2);
  const double f = pos - static_cast<double>(i);
  return s[i] + f * (s[i + 1] - s[i]);
}

double PulseEnvelope::square_amplitude() const {
  const auto* sq = std::get_if<Square>(&shape_);
  if (!sq) throw ParameterError("square_amplitude: pulse is not square");
  return sq->amplitude;
}

double PulseEnvelope::area() const {
  if (const auto* sq = std::get_if<Square>(&shape_)) return sq->amplitude * duration_;
  return simpson([this](double t) { return amplitude(t); }, duration_, quadrature_intervals(*this));
}

double PulseEnvelope::absolute_area() const {
  if (const auto* sq = std::get_if<Square>(&shape_)) return std::abs(sq->amplitude) * duration_;
  return simpson([this](double t) { return std::abs(amplitude(t)); }, duration_,
                 quadrature_intervals(*this));
}

PulseEnvelope PulseEnvelope::scaled(double factor) const {
  if (const auto* sq = std::get_if<Square>(&shape_)) {
    return square(sq->amplitude * factor, duration_, phase_);
  }
  if (const auto* p = std::get_if<SincDiffParams>(&shape_)) {
    return sinc_diff({p->a1 * factor, p->b1, p->a2 * factor, p->b2}, duration_, phase_);
  }
  auto s = std::get<std::vector<double>>(shape_);
  for (double& v : s) v *= factor;
  return tabulated(std::move(s), duration_, phase_);
}

PulseEnvelope square_pulse(double area, double duration, double phase, double peak_rabi) {
  check_duration(duration);
  const double rabi = area / duration;
  if (std::abs(rabi) > peak_rabi * (1.0 + 1e-12)) {
    throw CapabilityError("square pulse needs Rabi frequency " + std::to_string(hertz(std::abs(rabi))) +
                          " Hz, above the " + std::to_string(hertz(peak_rabi)) + " Hz limit");
  }
  return PulseEnvelope::square(rabi, duration, phase);
}

void write_envelope_csv(std::ostream& os, const PulseEnvelope& env, std::size_t n_samples) {
  if (n_samples < 2) n_samples = 2;
  CsvWriter csv(os, {"t_us", "amplitude_rad_per_s", "phase_rad"});
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = env.duration() * static_cast<double>(k) / static_cast<double>(n_samples - 1);
    csv.row({t * 1e6, env.amplitude(t), env.phase()});
  }
}

// ---------------------------------------------------------------- Timeline

Timeline& Timeline::add(double start, const PulseEnvelope& pulse) {
  if (!(start >= 0.0)) throw ParameterError("timeline: pulse start must be >= 0");
  if (!events_.empty() && start < events_.back().end()) {
    throw ParameterError("timeline: pulses must be sorted and non-overlapping");
  }
  if (start + pulse.duration() > total_duration_ * (1.0 + 1e-12)) {
    throw ParameterError("timeline: pulse ends after the total duration");
  }
  events_.push_back({start, pulse});
  return *this;
}

namespace {

nlohmann::json envelope_to_json(const PulseEnvelope& env) {
  nlohmann::json j{{"kind", to_string(env.kind())},
                   {"duration", env.duration()},
                   {"phase", env.phase()}};
  switch (env.kind()) {
    case PulseKind::kSquare:
      j["amplitude"] = env.square_amplitude();
      break;
    case PulseKind::kSincDiff: {
      const auto* p = env.sinc_params();
      j["a1"] = p->a1;
      j["b1"] = p->b1;
      j["a2"] = p->a2;
      j["b2"] = p->b2;
      break;
    }
    case PulseKind::kTabulated:
      j["samples"] = *env.samples();
      break;
  }
  return j;
}

PulseEnvelope envelope_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double duration = j.at("duration").get<double>();
  const double phase = j.at("phase").get<double>();
  if (kind == "square") return PulseEnvelope::square(j.at("amplitude").get<double>(), duration, phase);
  if (kind == "sinc_diff") {
    return PulseEnvelope::sinc_diff({j.at("a1").get<double>(), j.at("b1").get<double>(),
                                     j.at("a2").get<double>(), j.at("b2").get<double>()},
                                    duration, phase);
  }
  if (kind == "tabulated") {
    return PulseEnvelope::tabulated(j.at("samples").get<std::vector<double>>(), duration, phase);
  }
  throw ParameterError("unknown pulse kind '" + kind + "'");
}

}  // namespace

std::string Timeline::to_json() const {
  nlohmann::json j;
  j["total_duration"] = total_duration_;
  j["events"] = nlohmann::json::array();
  for (const auto& e : events_) {
    j["events"].push_back({{"start", e.start}, {"pulse", envelope_to_json(e.pulse)}});
  }
  return j.dump(2);
}

Timeline Timeline::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    Timeline t(j.at("total_duration").get<double>());
    for (const auto& e : j.at("events")) {
      t.add(e.at("start").get<double>(), envelope_from_json(e.at("pulse")));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("timeline json: ") + e.what());
  }
}

Timeline tomography_timeline(const PulseEnvelope& prep, double peak_rabi) {
  using namespace tomo_sequence;
  if (prep.duration() > kRephaseStart) {
    throw ParameterError("tomography_timeline: preparation pulse longer than 70 us");
  }
  Timeline t(kTotalDuration);
  t.add(0.0, prep);
  t.add(kRephaseStart, square_pulse(kPi, kRephaseDuration, 0.0, peak_rabi));
  t.add(kReadoutStart, square_pulse(kPi / 2.0, kReadoutDuration, 0.0, peak_rabi));
  return t;
}

// ------------------------------------------------------- zero-area synthesis

ContractGrid zero_area_contract_grid(double band_outer_hz, double band_inner_hz,
                                     const ZeroAreaOptions& o, std::size_t density) {
  density = std::max<std::size_t>(density, 1);
  ContractGrid g;
  const double inner_edge = o.inner_fraction * band_inner_hz;
  const double band_lo = o.band_lo_factor * band_inner_hz;
  const double band_hi = o.band_hi_fraction * band_outer_hz;
  const std::size_t n_inner = 32 * density;
  for (std::size_t k = 0; k <= n_inner; ++k) {
    g.inner.push_back(angular(inner_edge * static_cast<double>(k) / static_cast<double>(n_inner)));
  }
  // Dense near the inner band edge, where the response rises, then coarser.
  const double knee = std::min(band_hi, 4.0 * band_inner_hz);
  const std::size_t n_knee = 24 * density;
  for (std::size_t k = 0; k < n_knee; ++k) {
    g.band.push_back(angular(band_lo + (knee - band_lo) * static_cast<double>(k) /
                                           static_cast<double>(n_knee)));
  }
  const std::size_t n_far = 40 * density;
  for (std::size_t k = 0; k <= n_far; ++k) {
    g.band.push_back(
        angular(knee + (band_hi - knee) * static_cast<double>(k) / static_cast<double>(n_far)));
  }
  return g;
}

namespace {

struct Candidate {
  SincDiffParams params;
  double inner_max = 0.0;
  double band_min = 0.0;
  double margin = -std::numeric_limits<double>::infinity();
  double ranking = -std::numeric_limits<double>::infinity();
  bool evaluated = false;
};

double truncated_sinc_integral(double b, double duration) {
  const std::size_t n = std::max<std::size_t>(20000, static_cast<std::size_t>(400.0 * b * duration));
  return simpson([&](double t) { return sinc(b * (t - 0.5 * duration)); }, duration, n);
}

/// Evaluates the contract at one rabi_scale; stops at the first violated point unless `full`.
void evaluate(Candidate& c, const ShapedPropagator& prop, const ContractGrid& grid,
              const ZeroAreaOptions& o, bool full, double scale = 1.0) {
  c.inner_max = 0.0;
  c.band_min = 1.0;
  c.evaluated = true;
  // Cheapest rejections first: the two band ends, then the inner band.
  const std::vector<double> probes{grid.band.front(), grid.band.back()};
  for (double d : probes) {
    c.band_min = std::min(c.band_min, prop.excitation_probability(d, scale));
    if (!full && c.band_min < o.band_min_excitation) {
      c.margin = c.band_min - o.band_min_excitation;
      return;
    }
  }
  for (double d : grid.inner) {
    c.inner_max = std::max(c.inner_max, prop.excitation_probability(d, scale));
    if (!full && c.inner_max > o.inner_max_excitation) {
      c.margin = o.inner_max_excitation - c.inner_max;
      return;
    }
  }
  for (double d : grid.band) {
    c.band_min = std::min(c.band_min, prop.excitation_probability(d, scale));
    if (!full && c.band_min < o.band_min_excitation) {
      c.margin = c.band_min - o.band_min_excitation;
      return;
    }
  }
  c.margin = std::min(c.band_min - o.band_min_excitation, o.inner_max_excitation - c.inner_max);
}

}  // namespace

ZeroAreaDesign design_zero_area(double band_outer_hz, double band_inner_hz, double duration,
                                const ZeroAreaOptions& o) {
  if (!(band_inner_hz > 0.0) || !(band_outer_hz > band_inner_hz)) {
    throw ParameterError("synthesize_zero_area: need 0 < band_inner < band_outer");
  }
  check_duration(duration);

  const ContractGrid grid = zero_area_contract_grid(band_outer_hz, band_inner_hz, o, 1);

  // Spectral edges are scaled around their nominal positions (2 outer, 2 inner);
  // A2 follows from the zero-area condition, so only the in-band area is free.
  static constexpr double kOuterScale[] = {1.0, 1.1, 1.2, 1.3};
  static constexpr double kInnerScale[] = {0.80, 0.84, 0.88, 0.92, 0.96, 1.0, 1.04, 1.08, 1.12};
  std::vector<Candidate> candidates;
  for (double f1 : kOuterScale) {
    const double b1 = 2.0 * band_outer_hz * f1;
    const double i_b1 = truncated_sinc_integral(b1, duration);
    for (double f2 : kInnerScale) {
      const double b2 = 2.0 * band_inner_hz * f2;
      const double ratio = i_b1 / truncated_sinc_integral(b2, duration);
      for (int is = 0; is < 20; ++is) {
        const double area = 1.2 + 0.1 * is;  // in-band spectral area, rad
        const double a1 = area * b1;
        const double a2 = a1 * ratio;
        if (std::abs(a1 - a2) > o.peak_rabi) continue;
        candidates.push_back({{a1, b1, a2, b2}});
      }
    }
  }

  const double spread = std::max(0.0, o.ranking_rabi_spread);
  const double max_det = grid.band.back();
  parallel_for_chunks(candidates.size(), o.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Candidate& c = candidates[i];
      const PulseEnvelope env = PulseEnvelope::sinc_diff(c.params, duration, 0.0);
      if (env.peak() > o.peak_rabi) continue;
      const ShapedPropagator prop(env, max_det, 1.0 + spread);
      evaluate(c, prop, grid, o, false);
      c.ranking = c.margin;
      if (c.margin < 0.0 || spread == 0.0) continue;
      for (double scale : {1.0 - spread, 1.0 + spread}) {
        Candidate side = c;
        evaluate(side, prop, grid, o, true, scale);
        c.ranking = std::min(c.ranking, side.margin);
      }
    }
  });

  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = candidates[a];
    const auto& cb = candidates[b];
    if (ca.ranking != cb.ranking) return ca.ranking > cb.ranking;
    return std::tie(ca.params.a1, ca.params.a2) < std::tie(cb.params.a1, cb.params.a2);
  });

  double best_residual = std::numeric_limits<double>::infinity();
  for (const Candidate& c : candidates) {
    if (c.evaluated) best_residual = std::min(best_residual, -c.margin);
  }

  // Confirm on a denser grid; the coarse grid can miss ripple extrema.
  const ContractGrid dense = zero_area_contract_grid(band_outer_hz, band_inner_hz, o, 3);
  for (std::size_t rank = 0; rank < std::min<std::size_t>(order.size(), 8); ++rank) {
    Candidate c = candidates[order[rank]];
    if (!c.evaluated || c.margin < 0.0) break;
    const PulseEnvelope env = PulseEnvelope::sinc_diff(c.params, duration, 0.0);
    evaluate(c, ShapedPropagator(env, dense.band.back(), 1.0), dense, o, true);
    if (c.margin >= 0.0) return {env, c.inner_max, c.band_min, c.margin, c.ranking};
    best_residual = std::min(best_residual, -c.margin);
  }
  throw SynthesisError("synthesize_zero_area: no sinc-difference pulse met the excitation "
                       "contract; best residual " + std::to_string(best_residual),
                       best_residual);
}

PulseEnvelope synthesize_zero_area(double band_outer_hz, double band_inner_hz, double duration,
                                   const ZeroAreaOptions& options) {
  return design_zero_area(band_outer_hz, band_inner_hz, duration, options).envelope;
}

}  // namespace eqt
