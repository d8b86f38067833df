#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "eqt/units.hpp"

namespace eqt {

enum class PulseKind { kSquare, kSincDiff, kTabulated };

std::string to_string(PulseKind kind);

/// amplitude(t) = a1*sinc(b1*(t - T/2)) - a2*sinc(b2*(t - T/2)), sinc(u) = sin(pi u)/(pi u).
/// a1, a2 in rad/s; b1, b2 in Hz.
struct SincDiffParams {
  double a1 = 0.0;
  double b1 = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
  friend bool operator==(const SincDiffParams&, const SincDiffParams&) = default;
};

/// Normalized sinc, sin(pi u)/(pi u).
double sinc(double u);

/// Time-dependent Rabi amplitude (rad/s) with a constant optical phase, defined
/// on [0, duration]. Immutable value type.
class PulseEnvelope {
 public:
  static PulseEnvelope square(double amplitude, double duration, double phase);
  static PulseEnvelope sinc_diff(const SincDiffParams& params, double duration, double phase);
  /// Uniform samples over [0, duration] (first at 0, last at duration), linearly interpolated.
  static PulseEnvelope tabulated(std::vector<double> samples, double duration, double phase);

  PulseKind kind() const;
  double duration() const { return duration_; }
  double phase() const { return phase_; }
  /// Rabi amplitude at time t; zero outside [0, duration].
  double amplitude(double t) const;
  /// Largest |amplitude| over the pulse.
  double peak() const { return peak_; }
  /// Signed integral of the amplitude (rotation angle on resonance).
  double area() const;
  /// Integral of |amplitude|.
  double absolute_area() const;

  const SincDiffParams* sinc_params() const { return std::get_if<SincDiffParams>(&shape_); }
  const std::vector<double>* samples() const {
    return std::get_if<std::vector<double>>(&shape_);
  }
  /// Square pulses only: the constant amplitude.
  double square_amplitude() const;

  /// Same shape with every amplitude multiplied by `factor`.
  PulseEnvelope scaled(double factor) const;

  friend bool operator==(const PulseEnvelope&, const PulseEnvelope&) = default;

 private:
  struct Square {
    double amplitude = 0.0;
    friend bool operator==(const Square&, const Square&) = default;
  };
  using Shape = std::variant<Square, SincDiffParams, std::vector<double>>;

  PulseEnvelope(Shape shape, double duration, double phase);

  Shape shape_;
  double duration_ = 0.0;
  double phase_ = 0.0;
  double peak_ = 0.0;
};

/// Constant-amplitude pulse of the given area. Throws CapabilityError when
/// area/duration exceeds `peak_rabi`.
PulseEnvelope square_pulse(double area, double duration, double phase,
                           double peak_rabi = kDefaultPeakRabi);

/// Writes t_us, amplitude_rad_per_s, phase_rad rows.
void write_envelope_csv(std::ostream& os, const PulseEnvelope& env, std::size_t n_samples = 1001);

struct TimelineEvent {
  double start = 0.0;
  PulseEnvelope pulse;
  double end() const { return start + pulse.duration(); }
  friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

/// Ordered, non-overlapping pulse schedule; free evolution fills the gaps.
class Timeline {
 public:
  explicit Timeline(double total_duration) : total_duration_(total_duration) {}

  /// Appends a pulse. Throws ParameterError if it starts before the previous
  /// pulse ends or runs past the total duration.
  Timeline& add(double start, const PulseEnvelope& pulse);

  const std::vector<TimelineEvent>& events() const { return events_; }
  double total_duration() const { return total_duration_; }

  std::string to_json() const;
  static Timeline from_json(const std::string& text);

  friend bool operator==(const Timeline&, const Timeline&) = default;

 private:
  std::vector<TimelineEvent> events_;
  double total_duration_ = 0.0;
};

/// Fixed tomography schedule constants.
namespace tomo_sequence {
inline constexpr double kRephaseStart = 70e-6;
inline constexpr double kRephaseDuration = 2e-6;
inline constexpr double kReadoutStart = 140e-6;
inline constexpr double kReadoutDuration = 1e-6;
inline constexpr double kTotalDuration = 200e-6;
/// Seconds of pulse per radian of area at the 250 kHz Rabi limit (pi/2 in 1 us).
inline constexpr double kDurationPerArea = 1e-6 / (kPi / 2.0);
}  // namespace tomo_sequence

/// prep at 0, in-phase pi (2 us) at 70 us, in-phase pi/2 (1 us) at 140 us, 200 us total.
Timeline tomography_timeline(const PulseEnvelope& prep, double peak_rabi = kDefaultPeakRabi);

struct ZeroAreaOptions {
  double peak_rabi = kAvailablePeakRabi;  ///< rad/s
  /// Contract thresholds on the excitation probability.
  double inner_max_excitation = 0.05;
  double band_min_excitation = 0.5;
  /// Contract regions as multiples of band_inner / band_outer.
  double inner_fraction = 0.8;
  double band_lo_factor = 1.5;
  double band_hi_fraction = 0.9;
  /// Feasible candidates are ranked by their contract margin at the worst of
  /// rabi_scale 1 - spread, 1, 1 + spread. The contract itself is checked at 1.
  double ranking_rabi_spread = 0.1;
  std::size_t workers = 1;
};

struct ZeroAreaDesign {
  PulseEnvelope envelope;
  double inner_max = 0.0;  ///< worst excitation inside the protected band
  double band_min = 0.0;   ///< worst excitation inside the target band
  double margin = 0.0;     ///< min of the two contract slacks (>= 0 when met)
  double ranking_margin = 0.0;  ///< margin at the worst rabi_scale used for ranking
};

/// Sinc-difference pulse with zero net area that excites |detuning| in
/// [1.5 inner, 0.9 outer] with probability >= 0.5 and leaves |detuning| <= 0.8 inner
/// below 0.05. Bands are ordinary frequencies (Hz). Throws SynthesisError.
ZeroAreaDesign design_zero_area(double band_outer_hz, double band_inner_hz, double duration,
                                const ZeroAreaOptions& options = {});

PulseEnvelope synthesize_zero_area(double band_outer_hz, double band_inner_hz, double duration,
                                   const ZeroAreaOptions& options = {});

/// Detunings (rad/s) at which the zero-area contract is evaluated.
struct ContractGrid {
  std::vector<double> inner;
  std::vector<double> band;
};
ContractGrid zero_area_contract_grid(double band_outer_hz, double band_inner_hz,
                                     const ZeroAreaOptions& options, std::size_t density = 1);

}  // namespace eqt
