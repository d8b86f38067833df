#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eqt/ensemble.hpp"
#include "eqt/pulses.hpp"

namespace eqt {

struct NoiseModel {
  double shot_scale_jitter = 0.1;   ///< fractional std-dev of the per-trace scale
  double additive_noise_rms = 0.0;  ///< per-sample Gaussian noise, emission units
};

void validate(const NoiseModel& noise);

struct TraceOptions {
  double sample_interval = 0.1e-6;
  double recovery_time = 10e-6;
  double emission_scale = 1.0;  ///< emission per fully coherent ion, before jitter
  std::uint64_t seed = 1;
  std::uint64_t shot = 0;  ///< selects the noise stream for this trace
  std::size_t workers = 1;
};

struct IQTrace {
  double sample_interval = 0.0;
  std::vector<double> t;
  std::vector<double> i;
  std::vector<double> q;
  std::vector<std::uint8_t> blanked;
  double scale = 1.0;  ///< shot scale actually used

  std::size_t size() const { return t.size(); }
};

/// Propagates every ion through the timeline and records the demodulated
/// emission I = -scale * sum(w x) / N, Q = +scale * sum(w y) / N, where w is the
/// ion's 5/2 population and N the ensemble size. Samples inside a pulse or its
/// recovery time are blanked (I = Q = 0). Throws EstimationError on an empty ensemble.
IQTrace synthesize_trace(const IonEnsemble& ensemble, const Timeline& timeline,
                         const NoiseModel& noise, const TraceOptions& options = {});

/// Writes t_us, I, Q, blanked rows.
void write_trace_csv(std::ostream& os, const IQTrace& trace);

struct Window {
  double start = 0.0;
  double end = 0.0;
};

struct WindowMean {
  double i = 0.0;
  double q = 0.0;
};

/// Mean of I and Q over samples in [start, end]. Throws ConfigError if the
/// window leaves the trace, holds no sample, or touches a blanked sample.
WindowMean integrate_window(const IQTrace& trace, const Window& window);

/// w1 after the preparation pulse, w2 on the echo before the readout pulse,
/// w3 after the readout pulse.
struct MeasurementWindows {
  std::array<Window, 3> w;
};

struct WindowLayout {
  double recovery_time = 10e-6;
  /// A free-induction window opens at pulse start + max(pulse duration,
  /// min_pulse_slot) + recovery, so it does not move with the prepared state.
  double min_pulse_slot = 2e-6;
  double fid_span = 3e-6;
  double echo_lead = 18e-6;  ///< w2 opens this long before the readout pulse
  double echo_gap = 1e-6;    ///< and closes this long before it
};

/// Windows for a three-pulse tomography timeline. Throws ConfigError for other
/// timelines or when the windows overlap each other or a blanked region.
MeasurementWindows default_windows(const Timeline& timeline, const WindowLayout& layout = {});

/// Throws ConfigError if windows overlap one another or the blanking of `timeline`.
void check_windows(const MeasurementWindows& windows, const Timeline& timeline,
                   double recovery_time);

}  // namespace eqt
