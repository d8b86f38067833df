#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eqt/ensemble.hpp"
#include "eqt/histogram.hpp"
#include "eqt/units.hpp"

namespace eqt {

enum class Orientation { kDipolar, kIsotropic };

std::string to_string(Orientation o);

/// Excitation-induced dipole-dipole shift C * k(theta) / r^3 with
/// C = shift_ref * r_ref^3 and k = 1 - 3 cos^2(theta) (or 1 when isotropic).
struct InteractionModel {
  double shift_ref_hz = 1e9;
  double r_ref_nm = 2.5;
  double excited_fraction = 1.0;   ///< fraction of perturbers the perturbing pulse excites
  double perturber_density = 0.0;  ///< perturbers per nm^3
  Orientation orientation = Orientation::kDipolar;

  /// Hz nm^3
  double coupling() const { return shift_ref_hz * r_ref_nm * r_ref_nm * r_ref_nm; }
};

/// Throws ParameterError naming the offending field.
void validate(const InteractionModel& model);

/// Number density of a subset holding `fraction` of a lattice with mean
/// separation `a_nm`, using the Wigner-Seitz radius convention 4/3 pi a^3 rho = 1.
double density_from_separation(double a_nm, double fraction);

/// Shift (Hz) on a target at the origin from excited perturbers at `positions` (nm).
double shift_from_positions(const InteractionModel& model, std::span<const Position> positions);

/// Radius (nm) of the sphere holding `n_perturbers` excited perturbers on average.
double sampling_radius(const InteractionModel& model, std::size_t n_perturbers);

/// Perturber positions for one target, uniform in the sampling sphere.
std::vector<Position> sample_perturbers(const InteractionModel& model, std::size_t n_perturbers,
                                        std::uint64_t seed, std::uint64_t target);

/// Per-target total shift (Hz); zero for every target when nothing is excited.
std::vector<double> sample_shifts(const InteractionModel& model, std::size_t n_targets,
                                  std::size_t n_perturbers_per_target, std::uint64_t seed,
                                  std::size_t workers = 1);

enum class PerturbTiming {
  kNone,
  kBeforeHalf,  ///< shift present for the whole sequence
  kAfterHalf,   ///< switched on just after the pi/2 pulse
  kAfterPi,     ///< switched on just after the pi pulse
};

std::string to_string(PerturbTiming t);

struct EchoExperiment {
  double tau = 100e-6;
  PerturbTiming timing = PerturbTiming::kNone;
  double perturber_offset_hz = 5e6;  ///< metadata only
  /// Instantaneous pulses. With finite pulses the pi/2 and pi last
  /// (pi/2)/peak_rabi and pi/peak_rabi.
  bool hard_pulses = true;
  double peak_rabi = kDefaultPeakRabi;
};

/// pi/2 - tau - pi - tau, then |I + iQ| at the echo. There are
/// max(ions, shifts) targets; target j is ion j % ions carrying shift
/// shifts_hz[j % shifts] from the perturbation instant on.
double run_echo(const IonEnsemble& ensemble, const EchoExperiment& experiment,
                std::span<const double> shifts_hz, std::size_t workers = 1);

/// Samples one shift per ion from `model`, then runs the echo.
double run_echo(const IonEnsemble& ensemble, const EchoExperiment& experiment,
                const InteractionModel& model, std::size_t n_perturbers, std::uint64_t seed,
                std::size_t workers = 1);

/// |mean over targets of exp(i 2 pi shift tau)|.
double echo_characteristic(std::span<const double> shifts_hz, double tau);

struct EchoCurve {
  std::vector<double> tau;
  std::vector<double> none;
  std::vector<double> after_half;
  std::vector<double> after_pi;

  /// tau_us, amp_none, amp_after_half, amp_after_pi
  void write_csv(std::ostream& os) const;
};

/// Runs every tau with the three timings, reusing one set of shifts.
EchoCurve echo_curve(const IonEnsemble& ensemble, std::span<const double> shifts_hz,
                     std::span<const double> tau_grid, const EchoExperiment& base = {},
                     std::size_t workers = 1);

/// Writes shift_hz, density over +-span_hwhm half widths around the median.
void write_shift_histogram_csv(std::ostream& os, std::span<const double> shifts_hz,
                               double span_hwhm = 10.0, std::size_t bins = 200);

}  // namespace eqt
