#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <cstddef>
#include <optional>
#include <string>

#include "eqt/dynamics.hpp"
#include "eqt/ensemble.hpp"
#include "eqt/histogram.hpp"
#include "eqt/pulses.hpp"
#include "eqt/units.hpp"

namespace eqt {

struct NarrowingPlan {
  double band_outer = kHz(500.0);  ///< rad/s
  double band_inner = kHz(25.0);   ///< rad/s
  double duration = 80e-6;
  std::size_t n_rounds = 20;
  ZeroAreaOptions synthesis;
  /// Step control when applying the pulse to every ion; excitation
  /// probabilities only feed Bernoulli draws, so 1e-4 accuracy is plenty.
  IntegratorOptions integrator{1e-3, 0.04};
};

struct RabiSelectPlan {
  double pulse_duration = 4e-6;
  std::size_t n_pulses = 10;
  double inter_pulse_delay = 8e-3;  ///< recorded only; excited ions fully decay in between
};

/// Hole-burning recipe. Frequencies in rad/s unless suffixed _hz.
struct PreparationPlan {
  double trench_width = MHz(1.0);
  double trench_residual = 1e-3;  ///< probability an ion inside the trench escapes burning
  double repump_rf_center_hz = 34.5e6;
  double repump_rf_half_width_hz = 1.0e6;
  double aux_offset_hz = 95.9e6;
  double antihole_fwhm = kHz(300.0);
  NarrowingPlan narrowing;
  RabiSelectPlan rabi_select;
  /// Decay branching into the 1/2, 3/2 and 5/2 ground levels.
  std::array<double, kNumGroundLevels> branching{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  double branching_back() const { return branching[2]; }
};

/// Throws ParameterError naming the offending field.
void validate(const PreparationPlan& plan);

/// Ions inside the trench are shelved with probability 1 - trench_residual.
void burn_trench(IonEnsemble& ensemble, const PreparationPlan& plan, std::uint64_t seed,
                 std::size_t workers = 1);

/// Shelved ions return to the 5/2 level with Lorentzian acceptance
/// 1 / (1 + (2 detuning / antihole_fwhm)^2).
void repump_antihole(IonEnsemble& ensemble, const PreparationPlan& plan, std::uint64_t seed,
                     std::size_t workers = 1);

/// Repeated zero-area pulses; each round an active ion is excited with the
/// pulse's excitation probability and then lost with probability 1 - branching_back.
/// Returns the pulse used; pass `pulse` to skip synthesis.
PulseEnvelope apply_narrowing(IonEnsemble& ensemble, const PreparationPlan& plan,
                              std::uint64_t seed, std::size_t workers = 1,
                              const std::optional<PulseEnvelope>& pulse = std::nullopt);

/// Excitation probability of one square pulse of nominal area 2pi (Rabi
/// 2pi / pulse_duration) at this detuning and rabi_scale.
double rabi_select_excitation(const RabiSelectPlan& plan, double detuning, double rabi_scale);

/// n_pulses nominal-2pi pulses; survivors cluster near rabi_scale 1.
void rabi_postselect(IonEnsemble& ensemble, const PreparationPlan& plan, std::uint64_t seed,
                     std::size_t workers = 1);

struct PreparationReport {
  std::size_t initial = 0;
  std::size_t after_trench = 0;
  std::size_t after_repump = 0;
  std::size_t after_narrowing = 0;
  std::size_t after_rabi_select = 0;
  Histogram spectrum;  ///< active detunings, kHz
  Histogram rabi;      ///< active rabi_scale
  double width_10_hz = 0.0;
  double fwhm_hz = 0.0;
  double rectangularity = 0.0;   ///< fwhm / width at 10% height
  double rabi_half_width = 0.0;  ///< fractional HWHM of the surviving rabi_scale
  double narrowing_pulse_peak_hz = 0.0;
  double narrowing_pulse_area = 0.0;

  std::string to_json(const PreparationPlan& plan) const;
};

/// Histogram of active detunings (kHz) on [-range_khz, range_khz).
Histogram active_spectrum(const IonEnsemble& ensemble, double range_khz = 600.0,
                          std::size_t bins = 240);

/// Width at 10% height, FWHM and their ratio of an active spectrum, in Hz.
struct FeatureShape {
  double width_10_hz = 0.0;
  double fwhm_hz = 0.0;
  double rectangularity = 0.0;
};
FeatureShape feature_shape(const IonEnsemble& ensemble);

/// Fractional half width at half maximum of the active rabi_scale distribution.
double rabi_half_width(const IonEnsemble& ensemble);

struct PreparedEnsemble {
  IonEnsemble ensemble;  ///< active ions only
  PreparationReport report;
};

/// Samples `raw`, then burns, repumps, narrows and post-selects.
PreparedEnsemble prepare(const EnsembleSpec& raw, const PreparationPlan& plan,
                         std::size_t workers = 1,
                         const std::optional<PulseEnvelope>& narrowing_pulse = std::nullopt);

/// Writes detuning_khz, active_density rows.
void write_spectrum_csv(std::ostream& os, const Histogram& h);

}  // namespace eqt
