#include "eqt/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <ostream>

#include "eqt/csv.hpp"
#include "eqt/dynamics.hpp"
#include "eqt/error.hpp"
#include "eqt/parallel.hpp"
#include "eqt/random.hpp"

namespace eqt {

std::string to_string(Orientation o) {
  return o == Orientation::kDipolar ? "dipolar" : "isotropic";
}

std::string to_string(PerturbTiming t) {
  switch (t) {
    case PerturbTiming::kNone:
      return "none";
    case PerturbTiming::kBeforeHalf:
      return "before_half";
    case PerturbTiming::kAfterHalf:
      return "after_half";
    case PerturbTiming::kAfterPi:
      return "after_pi";
  }
  return "unknown";
}

void validate(const InteractionModel& m) {
  if (!(m.shift_ref_hz > 0.0)) throw ParameterError("interactions.shift_ref must be > 0");
  if (!(m.r_ref_nm > 0.0)) throw ParameterError("interactions.r_ref must be > 0");
  if (!(m.excited_fraction >= 0.0 && m.excited_fraction <= 1.0)) {
    throw ParameterError("interactions.excited_fraction must lie in [0, 1]");
  }
  if (!(m.perturber_density >= 0.0) || !std::isfinite(m.perturber_density)) {
    throw ParameterError("interactions.perturber_density must be >= 0");
  }
}

double density_from_separation(double a_nm, double fraction) {
  if (!(a_nm > 0.0)) throw ParameterError("mean separation must be > 0");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("fraction must lie in (0, 1]");
  return 3.0 * fraction / (4.0 * kPi * a_nm * a_nm * a_nm);
}

double shift_from_positions(const InteractionModel& model, std::span<const Position> positions) {
  const double c = model.coupling();
  double total = 0.0;
  for (const Position& p : positions) {
    const double r2 = p.x * p.x + p.y * p.y + p.z * p.z;
    if (!(r2 > 0.0)) throw ParameterError("perturber coincides with the target");
    const double r3 = r2 * std::sqrt(r2);
    const double k = model.orientation == Orientation::kDipolar ? 1.0 - 3.0 * p.z * p.z / r2 : 1.0;
    total += c * k / r3;
  }
  return total;
}

double sampling_radius(const InteractionModel& model, std::size_t n_perturbers) {
  const double rho = model.perturber_density * model.excited_fraction;
  if (!(rho > 0.0)) return 0.0;
  return std::cbrt(3.0 * static_cast<double>(n_perturbers) / (4.0 * kPi * rho));
}

std::vector<Position> sample_perturbers(const InteractionModel& model, std::size_t n_perturbers,
                                        std::uint64_t seed, std::uint64_t target) {
  const double radius = sampling_radius(model, n_perturbers);
  std::vector<Position> out;
  if (radius == 0.0) return out;
  out.reserve(n_perturbers);
  RandomStream rng(seed, StreamPurpose::kShifts, target);
  for (std::size_t k = 0; k < n_perturbers; ++k) {
    double r = 0.0;
    while (!(r > 0.0)) r = radius * std::cbrt(rng.uniform());
    const double cos_t = rng.uniform(-1.0, 1.0);
    const double phi = rng.uniform(0.0, kTwoPi);
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    out.push_back({r * sin_t * std::cos(phi), r * sin_t * std::sin(phi), r * cos_t});
  }
  return out;
}

std::vector<double> sample_shifts(const InteractionModel& model, std::size_t n_targets,
                                  std::size_t n_perturbers, std::uint64_t seed,
                                  std::size_t workers) {
  validate(model);
  if (n_targets < 1 || n_perturbers < 1) {
    throw ParameterError("sample_shifts: counts must be >= 1");
  }
  std::vector<double> shifts(n_targets, 0.0);
  if (sampling_radius(model, n_perturbers) == 0.0) return shifts;
  parallel_for_chunks(n_targets, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      shifts[i] = shift_from_positions(model, sample_perturbers(model, n_perturbers, seed, i));
    }
  });
  return shifts;
}

double run_echo(const IonEnsemble& ensemble, const EchoExperiment& x,
                std::span<const double> shifts_hz, std::size_t workers) {
  if (ensemble.empty()) throw EstimationError("run_echo: empty ensemble");
  if (!(x.tau > 0.0)) throw ParameterError("echo tau must be > 0");
  if (x.timing != PerturbTiming::kNone && shifts_hz.empty()) {
    throw ParameterError("run_echo: perturbation needs at least one shift");
  }
  const bool before = x.timing == PerturbTiming::kBeforeHalf;
  const bool first_half = before || x.timing == PerturbTiming::kAfterHalf;
  const bool second_half = x.timing != PerturbTiming::kNone;

  std::optional<PulseEnvelope> half;
  std::optional<PulseEnvelope> pi;
  if (!x.hard_pulses) {
    half = square_pulse(kPi / 2.0, kPi / 2.0 / x.peak_rabi, 0.0, x.peak_rabi);
    pi = square_pulse(kPi, kPi / x.peak_rabi, 0.0, x.peak_rabi);
  }

  // One target per (ion, shift) pairing, cycling the shorter list.
  const std::size_t n_ions = ensemble.size();
  const std::size_t n = std::max(n_ions, shifts_hz.size());
  std::vector<double> xs(n, 0.0);
  std::vector<double> ys(n, 0.0);
  parallel_for_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      const Ion& ion = ensemble.ions[j % n_ions];
      const double w = ion.population(GroundLevel::kFiveHalf);
      if (w == 0.0) continue;
      const double shift = shifts_hz.empty() ? 0.0 : angular(shifts_hz[j % shifts_hz.size()]);
      const double d0 = ion.detuning + (before ? shift : 0.0);
      const double d1 = ion.detuning + (first_half ? shift : 0.0);
      const double d2 = ion.detuning + (second_half ? shift : 0.0);
      BlochVector b = ion.bloch;
      b = half ? propagate_pulse(b, *half, d0, ion.rabi_scale) : rotate(b, 0.0, kPi / 2.0 * ion.rabi_scale);
      b = free_evolve(b, d1, x.tau);
      b = pi ? propagate_pulse(b, *pi, d1, ion.rabi_scale) : rotate(b, 0.0, kPi * ion.rabi_scale);
      b = free_evolve(b, d2, x.tau);
      xs[j] = w * b.x;
      ys[j] = w * b.y;
    }
  });
  const double i_mean = -pairwise_sum(xs) / static_cast<double>(n);
  const double q_mean = pairwise_sum(ys) / static_cast<double>(n);
  return std::hypot(i_mean, q_mean);
}

double run_echo(const IonEnsemble& ensemble, const EchoExperiment& experiment,
                const InteractionModel& model, std::size_t n_perturbers, std::uint64_t seed,
                std::size_t workers) {
  const auto shifts = sample_shifts(model, std::max<std::size_t>(ensemble.size(), 1), n_perturbers,
                                    seed, workers);
  return run_echo(ensemble, experiment, shifts, workers);
}

double echo_characteristic(std::span<const double> shifts_hz, double tau) {
  if (shifts_hz.empty()) throw EstimationError("echo_characteristic: no shifts");
  std::vector<double> c(shifts_hz.size());
  std::vector<double> s(shifts_hz.size());
  for (std::size_t i = 0; i < shifts_hz.size(); ++i) {
    const double ph = kTwoPi * shifts_hz[i] * tau;
    c[i] = std::cos(ph);
    s[i] = std::sin(ph);
  }
  const double n = static_cast<double>(shifts_hz.size());
  return std::hypot(pairwise_sum(c) / n, pairwise_sum(s) / n);
}

EchoCurve echo_curve(const IonEnsemble& ensemble, std::span<const double> shifts_hz,
                     std::span<const double> tau_grid, const EchoExperiment& base,
                     std::size_t workers) {
  if (tau_grid.empty()) throw ParameterError("echo_curve: tau grid is empty");
  for (std::size_t k = 1; k < tau_grid.size(); ++k) {
    if (!(tau_grid[k] > tau_grid[k - 1])) throw ParameterError("echo_curve: tau grid must increase");
  }
  EchoCurve curve;
  for (double tau : tau_grid) {
    EchoExperiment x = base;
    x.tau = tau;
    curve.tau.push_back(tau);
    x.timing = PerturbTiming::kNone;
    curve.none.push_back(run_echo(ensemble, x, shifts_hz, workers));
    x.timing = PerturbTiming::kAfterHalf;
    curve.after_half.push_back(run_echo(ensemble, x, shifts_hz, workers));
    x.timing = PerturbTiming::kAfterPi;
    curve.after_pi.push_back(run_echo(ensemble, x, shifts_hz, workers));
  }
  return curve;
}

void EchoCurve::write_csv(std::ostream& os) const {
  CsvWriter csv(os, {"tau_us", "amp_none", "amp_after_half", "amp_after_pi"});
  for (std::size_t k = 0; k < tau.size(); ++k) {
    csv.row({tau[k] * 1e6, none[k], after_half[k], after_pi[k]});
  }
}

void write_shift_histogram_csv(std::ostream& os, std::span<const double> shifts_hz,
                               double span_hwhm, std::size_t bins) {
  CsvWriter csv(os, {"shift_hz", "density"});
  if (shifts_hz.empty()) return;
  const std::vector<double> v(shifts_hz.begin(), shifts_hz.end());
  const double mid = median(v);
  double half = sample_hwhm(shifts_hz);
  if (!(half > 0.0)) half = 1.0;
  const Histogram h = Histogram::build(shifts_hz, mid - span_hwhm * half, mid + span_hwhm * half, bins);
  const std::vector<double> d = h.density();
  for (std::size_t i = 0; i < h.bins(); ++i) csv.row({h.center(i), d[i]});
}

}  // namespace eqt
