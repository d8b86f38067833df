#include "eqt/spectral_prep.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "eqt/csv.hpp"
#include "eqt/dynamics.hpp"
#include "eqt/error.hpp"
#include "eqt/parallel.hpp"
#include "eqt/random.hpp"

namespace eqt {

void validate(const PreparationPlan& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be > 0");
  };
  positive(p.trench_width, "trench_width");
  positive(p.antihole_fwhm, "antihole_fwhm");
  positive(p.repump_rf_half_width_hz, "repump_rf_sweep half width");
  positive(p.narrowing.band_outer, "narrowing.band_outer");
  positive(p.narrowing.band_inner, "narrowing.band_inner");
  positive(p.narrowing.duration, "narrowing.duration");
  positive(p.rabi_select.pulse_duration, "rabi_select.pulse_duration");
  if (p.narrowing.band_inner >= p.narrowing.band_outer) {
    throw ParameterError("narrowing.band_inner must be below narrowing.band_outer");
  }
  if (p.rabi_select.n_pulses < 1) throw ParameterError("rabi_select.n_pulses must be >= 1");
  if (p.narrowing.n_rounds < 1) throw ParameterError("narrowing.n_rounds must be >= 1");
  if (p.trench_residual < 0.0 || p.trench_residual > 1.0) {
    throw ParameterError("trench_residual must lie in [0, 1]");
  }
  double sum = 0.0;
  for (double b : p.branching) {
    if (b < 0.0) throw ParameterError("branching ratios must be >= 0");
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ParameterError("branching ratios must sum to 1");
}

namespace {

/// Shelving destination for an ion that decays out of 5/2.
GroundLevel shelf_level(const PreparationPlan& plan, RandomStream& rng) {
  const double lost = plan.branching[0] + plan.branching[1];
  if (lost <= 0.0) return GroundLevel::kHalf;
  return rng.uniform() * lost < plan.branching[0] ? GroundLevel::kHalf : GroundLevel::kThreeHalf;
}

template <class PerIon>
void for_each_ion(IonEnsemble& e, std::size_t workers, PerIon&& f) {
  parallel_for_chunks(e.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) f(e.ions[i]);
  });
}

}  // namespace

void burn_trench(IonEnsemble& ensemble, const PreparationPlan& plan, std::uint64_t seed,
                 std::size_t workers) {
  validate(plan);
  const double half = 0.5 * plan.trench_width;
  for_each_ion(ensemble, workers, [&](Ion& ion) {
    if (!ion.active() || std::abs(ion.detuning) >= half) return;
    RandomStream rng(seed, StreamPurpose::kTrench, ion.id);
    if (rng.bernoulli(1.0 - plan.trench_residual)) ion.move_to(shelf_level(plan, rng));
  });
}

void repump_antihole(IonEnsemble& ensemble, const PreparationPlan& plan, std::uint64_t seed,
                     std::size_t workers) {
  validate(plan);
  for_each_ion(ensemble, workers, [&](Ion& ion) {
    if (ion.active()) return;
    const double u = 2.0 * ion.detuning / plan.antihole_fwhm;
    RandomStream rng(seed, StreamPurpose::kRepump, ion.id);
    if (rng.bernoulli(1.0 / (1.0 + u * u))) {
      ion.move_to(GroundLevel::kFiveHalf);
      ion.bloch = BlochVector::ground();
    }
  });
}

PulseEnvelope apply_narrowing(IonEnsemble& ensemble, const PreparationPlan& plan,
                              std::uint64_t seed, std::size_t workers,
                              const std::optional<PulseEnvelope>& pulse) {
  validate(plan);
  const auto& n = plan.narrowing;
  ZeroAreaOptions synth = n.synthesis;
  synth.workers = workers;
  const PulseEnvelope env =
      pulse ? *pulse : synthesize_zero_area(hertz(n.band_outer), hertz(n.band_inner), n.duration, synth);

  double max_det = 0.0;
  double max_scale = 0.0;
  for (const Ion& ion : ensemble.ions) {
    if (!ion.active()) continue;
    max_det = std::max(max_det, std::abs(ion.detuning));
    max_scale = std::max(max_scale, ion.rabi_scale);
  }
  if (max_scale == 0.0) return env;
  const ShapedPropagator prop(env, max_det, max_scale, n.integrator);
  const double loss = 1.0 - plan.branching_back();

  for_each_ion(ensemble, workers, [&](Ion& ion) {
    if (!ion.active()) return;
    const double p = prop.excitation_probability(ion.detuning, ion.rabi_scale);
    RandomStream rng(seed, StreamPurpose::kNarrowing, ion.id);
    for (std::size_t r = 0; r < n.n_rounds; ++r) {
      if (rng.bernoulli(p * loss)) {
        ion.move_to(shelf_level(plan, rng));
        return;
      }
    }
  });
  return env;
}

double rabi_select_excitation(const RabiSelectPlan& plan, double detuning, double rabi_scale) {
  const double rabi = kTwoPi / plan.pulse_duration * rabi_scale;
  const BlochVector b =
      propagate_const(BlochVector::ground(), rabi, 0.0, detuning, plan.pulse_duration);
  return std::clamp(0.5 * (1.0 + b.z), 0.0, 1.0);
}

void rabi_postselect(IonEnsemble& ensemble, const PreparationPlan& plan, std::uint64_t seed,
                     std::size_t workers) {
  validate(plan);
  const double loss = 1.0 - plan.branching_back();
  for_each_ion(ensemble, workers, [&](Ion& ion) {
    if (!ion.active()) return;
    // Every pulse starts from the ground state: the 8 ms gap lets excited ions decay.
    const double p = rabi_select_excitation(plan.rabi_select, ion.detuning, ion.rabi_scale);
    RandomStream rng(seed, StreamPurpose::kRabiSelect, ion.id);
    for (std::size_t k = 0; k < plan.rabi_select.n_pulses; ++k) {
      if (rng.bernoulli(p * loss)) {
        ion.move_to(shelf_level(plan, rng));
        return;
      }
    }
    ion.bloch = BlochVector::ground();
  });
}

Histogram active_spectrum(const IonEnsemble& ensemble, double range_khz, std::size_t bins) {
  std::vector<double> khz;
  khz.reserve(ensemble.size());
  for (const Ion& ion : ensemble.ions) {
    if (ion.active()) khz.push_back(hertz(ion.detuning) * 1e-3);
  }
  return Histogram::build(khz, -range_khz, range_khz, bins);
}

FeatureShape feature_shape(const IonEnsemble& ensemble) {
  // 1 kHz bins, 5 kHz smoothing: resolves 50 kHz edges without chasing shot noise.
  const Histogram h = active_spectrum(ensemble, 200.0, 400).smoothed(5);
  FeatureShape s;
  s.width_10_hz = width_at_fraction(h, 0.1) * 1e3;
  s.fwhm_hz = width_at_fraction(h, 0.5) * 1e3;
  s.rectangularity = s.width_10_hz > 0.0 ? s.fwhm_hz / s.width_10_hz : 0.0;
  return s;
}

double rabi_half_width(const IonEnsemble& ensemble) {
  std::vector<double> scales;
  for (const Ion& ion : ensemble.ions) {
    if (ion.active()) scales.push_back(ion.rabi_scale);
  }
  if (scales.size() < 10) throw EstimationError("rabi_half_width: too few active ions");
  return sample_hwhm(scales) / median(scales);
}

PreparedEnsemble prepare(const EnsembleSpec& raw, const PreparationPlan& plan, std::size_t workers,
                         const std::optional<PulseEnvelope>& narrowing_pulse) {
  validate(plan);
  IonEnsemble e = sample_ensemble(raw, workers);
  PreparationReport r;
  r.initial = e.active_count();
  burn_trench(e, plan, raw.seed, workers);
  r.after_trench = e.active_count();
  repump_antihole(e, plan, raw.seed, workers);
  r.after_repump = e.active_count();
  const PulseEnvelope pulse = apply_narrowing(e, plan, raw.seed, workers, narrowing_pulse);
  r.after_narrowing = e.active_count();
  r.narrowing_pulse_peak_hz = hertz(pulse.peak());
  r.narrowing_pulse_area = pulse.area();
  const FeatureShape shape = feature_shape(e);
  r.width_10_hz = shape.width_10_hz;
  r.fwhm_hz = shape.fwhm_hz;
  r.rectangularity = shape.rectangularity;
  rabi_postselect(e, plan, raw.seed, workers);
  r.after_rabi_select = e.active_count();
  r.spectrum = active_spectrum(e);
  IonEnsemble active = e.active_only();
  r.rabi = Histogram::build(active.rabi_scales(), 0.0, 2.0, 200);
  if (active.size() >= 10) r.rabi_half_width = rabi_half_width(active);
  return {std::move(active), std::move(r)};
}

std::string PreparationReport::to_json(const PreparationPlan& plan) const {
  auto hist = [](const Histogram& h) {
    nlohmann::json j{{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}, {"outside", h.outside}};
    return j;
  };
  // Configured aux offset next to the one computed from the hyperfine
  // splittings; the rotating frame already absorbs the difference.
  nlohmann::json j{
      {"counts",
       {{"initial", initial},
        {"after_trench", after_trench},
        {"after_repump", after_repump},
        {"after_narrowing", after_narrowing},
        {"after_rabi_select", after_rabi_select}}},
      {"narrowed_feature",
       {{"width_10_hz", width_10_hz}, {"fwhm_hz", fwhm_hz}, {"rectangularity", rectangularity}}},
      {"rabi_half_width", rabi_half_width},
      {"narrowing_pulse", {{"peak_hz", narrowing_pulse_peak_hz}, {"area_rad", narrowing_pulse_area}}},
      {"metadata",
       {{"repump_rf_center_hz", plan.repump_rf_center_hz},
        {"repump_rf_half_width_hz", plan.repump_rf_half_width_hz},
        {"aux_offset_hz", plan.aux_offset_hz},
        {"aux_offset_computed_hz", 96.3e6},
        {"inter_pulse_delay_s", plan.rabi_select.inter_pulse_delay}}},
      {"spectrum_khz", hist(spectrum)},
      {"rabi_scale", hist(rabi)}};
  return j.dump(2);
}

void write_spectrum_csv(std::ostream& os, const Histogram& h) {
  CsvWriter csv(os, {"detuning_khz", "active_density"});
  const std::vector<double> d = h.density();
  for (std::size_t i = 0; i < h.bins(); ++i) csv.row({h.center(i), d[i]});
}

}  // namespace eqt
