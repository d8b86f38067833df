#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eqt/bloch.hpp"
#include "eqt/detection.hpp"
#include "eqt/ensemble.hpp"
#include "eqt/pulses.hpp"

namespace eqt {

/// alpha|0> + beta|1>, normalized, global phase chosen so alpha is real and >= 0.
class TargetState {
 public:
  /// Throws ParameterError unless |alpha|^2 + |beta|^2 = 1 to 1e-12.
  TargetState(std::complex<double> alpha, std::complex<double> beta);

  /// Rescales to unit norm first; `correction` receives | |a|^2+|b|^2 - 1 |.
  static TargetState normalized(std::complex<double> alpha, std::complex<double> beta,
                                double* correction = nullptr);

  std::complex<double> alpha() const { return alpha_; }
  std::complex<double> beta() const { return beta_; }

 private:
  std::complex<double> alpha_;
  std::complex<double> beta_;
};

/// z = |beta|^2 - |alpha|^2, x + iy = 2 conj(alpha) beta.
BlochVector state_to_bloch(const TargetState& state);

/// Area in [0, pi] and phase of the rotation that takes |0> to `state`.
struct PrepRotation {
  double area = 0.0;
  double phase = 0.0;
};
PrepRotation prep_rotation_for_state(const TargetState& state);

/// Square pulse of duration area * duration_per_area. |0> gets a zero-amplitude
/// pulse lasting as long as a pi/2 pulse so the timeline shape does not change.
PulseEnvelope prep_pulse_for_state(const TargetState& state,
                                   double duration_per_area = tomo_sequence::kDurationPerArea,
                                   double peak_rabi = kDefaultPeakRabi);

/// Haar-random pure state; a pure function of (seed, index).
TargetState haar_random_state(std::uint64_t seed, std::uint64_t index);

using RawWindows = std::array<WindowMean, 3>;

struct TomographySetup {
  NoiseModel noise;
  TraceOptions trace;
  WindowLayout layout;  ///< its recovery_time is replaced by trace.recovery_time
  std::optional<MeasurementWindows> windows;  ///< overrides the layout
  double peak_rabi = kDefaultPeakRabi;
  double duration_per_area = tomo_sequence::kDurationPerArea;
  /// Calibrate one gain per window instead of a single scale.
  bool per_window_gains = true;
  std::size_t calibration_shots = 10;
  std::size_t repeats = 3;
};

struct TomographyRun {
  Timeline timeline{tomo_sequence::kTotalDuration};
  MeasurementWindows windows;
  IQTrace trace;
  RawWindows raw;
};

/// Prepares `state`, runs the three-pulse sequence and integrates the windows.
/// `shot` selects the noise draw.
TomographyRun run_tomography(const IonEnsemble& ensemble, const TargetState& state,
                             const TomographySetup& setup, std::uint64_t shot);

struct ScaleCalibration {
  double scale = 1.0;                  ///< emission units per unit Bloch length
  std::array<double, 3> gains{1, 1, 1};  ///< per-window scale used by the estimator
  RawWindows ground_mean{};            ///< mean windows of the |0> runs
  RawWindows plus_mean{};              ///< mean windows of the (|0>+|1>)/sqrt2 runs
};

/// Single scale s for every window.
ScaleCalibration uniform_calibration(double scale);

/// Runs |0> and (|0>+|1>)/sqrt2 `calibration_shots` times each. scale is the
/// mean of |I3| (|0>) and of (|I1|+|I2|)/2 (plus state). Throws CalibrationError
/// for an empty ensemble or vanishing signals.
ScaleCalibration calibrate(const IonEnsemble& ensemble, const TomographySetup& setup);

struct BlochEstimate {
  BlochVector r;
  double residual = 0.0;  ///< Euclidean norm of the fit residual, emission units
  BlochVector r_normalized;
  double scale = 1.0;
};

/// Least-squares solution of I1 = -g1 x, Q1 = g1 y, I2 = g2 x, Q2 = g2 y,
/// I3 = -g3 z, Q3 = g3 y. Throws ParameterError for a non-positive gain.
BlochEstimate estimate_bloch(const RawWindows& raw, const ScaleCalibration& calibration);

/// (1 + r . r_t) / 2 with r the estimate (clipped to the unit ball) or, when
/// assume_pure, the normalized estimate. Throws EstimationError if assume_pure
/// and |r| < 1e-6.
double fidelity(const TargetState& target, const BlochEstimate& estimate, bool assume_pure);

struct NamedState {
  std::string label;
  TargetState state;
};

/// The seven reference test states.
std::vector<NamedState> table1_states();

struct RepeatResult {
  BlochEstimate estimate;
  RawWindows raw;
  double raw_fidelity = 0.0;
  double normalized_fidelity = 0.0;
};

struct StateResult {
  NamedState target;
  std::vector<RepeatResult> repeats;
  double worst_raw_fidelity = 0.0;
  double worst_normalized_fidelity = 0.0;
};

struct FidelityReport {
  ScaleCalibration calibration;
  std::vector<StateResult> states;

  std::string to_json() const;
  /// state, fidelity, fidelity_assuming_pure_state
  void write_csv(std::ostream& os) const;
};

/// Calibrates once, then runs every state `setup.repeats` times with fresh noise
/// and keeps the worst fidelities.
FidelityReport table1_experiment(const IonEnsemble& ensemble, const TomographySetup& setup,
                                 const std::vector<NamedState>& states = table1_states());

}  // namespace eqt
