#include "eqt/ensemble.hpp"

#include <cmath>
#include <string>

#include "eqt/error.hpp"
#include "eqt/parallel.hpp"
#include "eqt/random.hpp"
#include "eqt/units.hpp"

namespace eqt {

std::size_t IonEnsemble::active_count() const {
  std::size_t n = 0;
  for (const auto& ion : ions) n += ion.active() ? 1 : 0;
  return n;
}

IonEnsemble IonEnsemble::active_only() const {
  IonEnsemble out;
  out.ions.reserve(ions.size());
  for (const auto& ion : ions) {
    if (ion.active()) out.ions.push_back(ion);
  }
  return out;
}

std::vector<double> IonEnsemble::detunings() const {
  std::vector<double> d;
  d.reserve(ions.size());
  for (const auto& ion : ions) d.push_back(ion.detuning);
  return d;
}

std::vector<double> IonEnsemble::rabi_scales() const {
  std::vector<double> r;
  r.reserve(ions.size());
  for (const auto& ion : ions) r.push_back(ion.rabi_scale);
  return r;
}

std::string profile_name(const DetuningProfile& p) {
  struct Visitor {
    std::string operator()(const profile::Rectangular&) const { return "rectangular"; }
    std::string operator()(const profile::Lorentzian&) const { return "lorentzian"; }
    std::string operator()(const profile::TrenchWithAntihole&) const { return "trench_antihole"; }
  };
  return std::visit(Visitor{}, p);
}

void validate(const EnsembleSpec& spec) {
  if (spec.n_ions < 1) throw ParameterError("ensemble.n_ions must be >= 1");
  if (!(spec.rabi_spread >= 0.0 && spec.rabi_spread <= 1.0)) {
    throw ParameterError("ensemble.rabi_spread must lie in [0, 1]");
  }
  if (!(spec.nominal_rabi > 0.0)) throw ParameterError("ensemble.nominal_rabi must be > 0");
  if (!(spec.density >= 0.0)) throw ParameterError("ensemble.density must be >= 0");
  if (const auto* r = std::get_if<profile::Rectangular>(&spec.detuning_profile)) {
    if (!(r->width >= 0.0)) throw ParameterError("ensemble.width must be >= 0");
  } else if (const auto* l = std::get_if<profile::Lorentzian>(&spec.detuning_profile)) {
    if (!(l->fwhm > 0.0)) throw ParameterError("ensemble.fwhm must be > 0");
  } else if (const auto* t = std::get_if<profile::TrenchWithAntihole>(&spec.detuning_profile)) {
    if (!(t->trench_width > 0.0)) throw ParameterError("ensemble.trench_width must be > 0");
    if (!(t->antihole_fwhm > 0.0)) throw ParameterError("ensemble.antihole_fwhm must be > 0");
  }
}

namespace {

double draw_detuning(const DetuningProfile& p, RandomStream& rng) {
  const double u = rng.uniform();
  if (const auto* r = std::get_if<profile::Rectangular>(&p)) {
    return r->width * (u - 0.5);
  }
  if (const auto* l = std::get_if<profile::Lorentzian>(&p)) {
    return 0.5 * l->fwhm * std::tan(kPi * (u - 0.5));
  }
  // Truncated Cauchy by inverse CDF restricted to the trench.
  const auto& t = std::get<profile::TrenchWithAntihole>(p);
  const double g = 0.5 * t.antihole_fwhm;
  const double edge = std::atan(0.5 * t.trench_width / g);
  return g * std::tan((2.0 * u - 1.0) * edge);
}

}  // namespace

IonEnsemble sample_ensemble(const EnsembleSpec& spec, std::size_t workers) {
  validate(spec);
  IonEnsemble out;
  out.ions.resize(spec.n_ions);
  const double box = spec.density > 0.0
                         ? std::cbrt(static_cast<double>(spec.n_ions) / spec.density)
                         : 0.0;
  parallel_for_chunks(spec.n_ions, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng(spec.seed, StreamPurpose::kEnsemble, i);
      Ion& ion = out.ions[i];
      ion.id = i;
      ion.detuning = draw_detuning(spec.detuning_profile, rng);
      ion.rabi_scale = 1.0 - spec.rabi_spread + 2.0 * spec.rabi_spread * rng.uniform();
      if (box > 0.0) {
        RandomStream prng(spec.seed, StreamPurpose::kPosition, i);
        ion.position = Position{box * prng.uniform(), box * prng.uniform(), box * prng.uniform()};
      }
    }
  });
  return out;
}

BlochVector ensemble_mean_bloch(const IonEnsemble& ensemble, std::span<const double> weights) {
  if (weights.size() != ensemble.size()) {
    throw ParameterError("ensemble_mean_bloch: weights size does not match ensemble");
  }
  std::vector<double> wx(weights.size()), wy(weights.size()), wz(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ParameterError("ensemble_mean_bloch: negative weight");
    const auto& b = ensemble.ions[i].bloch;
    wx[i] = weights[i] * b.x;
    wy[i] = weights[i] * b.y;
    wz[i] = weights[i] * b.z;
  }
  const double total = pairwise_sum(weights);
  if (!(total > 0.0)) throw EstimationError("ensemble_mean_bloch: all weights are zero");
  return {pairwise_sum(wx) / total, pairwise_sum(wy) / total, pairwise_sum(wz) / total};
}

}  // namespace eqt
