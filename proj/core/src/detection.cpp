#include "eqt/detection.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include "eqt/csv.hpp"
#include "eqt/dynamics.hpp"
#include "eqt/error.hpp"
#include "eqt/parallel.hpp"
#include "eqt/random.hpp"

namespace eqt {

void validate(const NoiseModel& noise) {
  if (!(noise.shot_scale_jitter >= 0.0)) throw ParameterError("shot_scale_jitter must be >= 0");
  if (!(noise.additive_noise_rms >= 0.0)) throw ParameterError("additive_noise_rms must be >= 0");
}

namespace {

constexpr double kTimeSlack = 1e-12;

bool is_blanked(double t, const Timeline& timeline, double recovery) {
  for (const auto& e : timeline.events()) {
    if (t >= e.start - kTimeSlack && t < e.end() + recovery - kTimeSlack) return true;
  }
  return false;
}

}  // namespace

IQTrace synthesize_trace(const IonEnsemble& ensemble, const Timeline& timeline,
                         const NoiseModel& noise, const TraceOptions& o) {
  validate(noise);
  if (ensemble.empty()) throw EstimationError("synthesize_trace: empty ensemble");
  if (!(o.sample_interval > 0.0)) throw ParameterError("sample_interval must be > 0");
  if (!(o.recovery_time >= 0.0)) throw ParameterError("recovery_time must be >= 0");

  IQTrace trace;
  trace.sample_interval = o.sample_interval;
  const auto n_samples =
      static_cast<std::size_t>(std::floor(timeline.total_duration() / o.sample_interval + 1e-9)) + 1;
  trace.t.resize(n_samples);
  trace.blanked.resize(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    trace.t[j] = o.sample_interval * static_cast<double>(j);
    trace.blanked[j] = is_blanked(trace.t[j], timeline, o.recovery_time) ? 1 : 0;
  }

  // Free interval preceding each pulse, plus the tail after the last one.
  const auto& events = timeline.events();
  std::vector<double> seg_start{0.0};
  std::vector<double> seg_end;
  for (const auto& e : events) {
    seg_end.push_back(e.start);
    seg_start.push_back(e.end());
  }
  seg_end.push_back(timeline.total_duration() + kTimeSlack);
  // Unblanked sample ranges [first, last) per free segment.
  std::vector<std::pair<std::size_t, std::size_t>> seg_samples(seg_start.size());
  {
    std::size_t j = 0;
    for (std::size_t s = 0; s < seg_start.size(); ++s) {
      while (j < n_samples && trace.t[j] < seg_start[s] - kTimeSlack) ++j;
      const std::size_t first = j;
      while (j < n_samples && trace.t[j] < seg_end[s] - kTimeSlack) ++j;
      seg_samples[s] = {first, j};
    }
  }

  double max_det = 0.0;
  double max_scale = 0.0;
  for (const Ion& ion : ensemble.ions) {
    max_det = std::max(max_det, std::abs(ion.detuning));
    max_scale = std::max(max_scale, std::abs(ion.rabi_scale));
  }
  const TimelinePropagator prop(timeline, max_det, max_scale);

  const std::size_t n_chunks = (ensemble.size() + kChunkSize - 1) / kChunkSize;
  std::vector<double> partial_x(n_chunks * n_samples, 0.0);
  std::vector<double> partial_y(n_chunks * n_samples, 0.0);

  parallel_for_chunks(ensemble.size(), o.workers, [&](std::size_t begin, std::size_t end) {
    const std::size_t chunk = begin / kChunkSize;
    double* sx = partial_x.data() + chunk * n_samples;
    double* sy = partial_y.data() + chunk * n_samples;
    for (std::size_t i = begin; i < end; ++i) {
      const Ion& ion = ensemble.ions[i];
      const double w = ion.population(GroundLevel::kFiveHalf);
      if (w == 0.0) continue;
      const std::complex<double> step = std::polar(1.0, ion.detuning * o.sample_interval);
      BlochVector b = ion.bloch;
      for (std::size_t s = 0; s < seg_start.size(); ++s) {
        const auto [first, last] = seg_samples[s];
        if (first < last) {
          const std::complex<double> c0(b.x, b.y);
          std::complex<double> c = c0 * std::polar(1.0, ion.detuning * (trace.t[first] - seg_start[s]));
          for (std::size_t j = first; j < last; ++j) {
            if (!trace.blanked[j]) {
              sx[j] += w * c.real();
              sy[j] += w * c.imag();
            }
            c *= step;
          }
        }
        if (s < events.size()) {
          b = free_evolve(b, ion.detuning, seg_end[s] - seg_start[s]);
          b = prop.apply_pulse(s, b, ion.detuning, ion.rabi_scale);
        }
      }
    }
  });

  RandomStream rng(o.seed, StreamPurpose::kNoise, o.shot);
  trace.scale = o.emission_scale;
  if (noise.shot_scale_jitter > 0.0) trace.scale *= 1.0 + noise.shot_scale_jitter * rng.normal();
  const double norm = trace.scale / static_cast<double>(ensemble.size());

  trace.i.assign(n_samples, 0.0);
  trace.q.assign(n_samples, 0.0);
  std::vector<double> column(n_chunks);
  for (std::size_t j = 0; j < n_samples; ++j) {
    if (trace.blanked[j]) continue;
    for (std::size_t c = 0; c < n_chunks; ++c) column[c] = partial_x[c * n_samples + j];
    trace.i[j] = -norm * pairwise_sum(column);
    for (std::size_t c = 0; c < n_chunks; ++c) column[c] = partial_y[c * n_samples + j];
    trace.q[j] = norm * pairwise_sum(column);
    if (noise.additive_noise_rms > 0.0) {
      trace.i[j] += noise.additive_noise_rms * rng.normal();
      trace.q[j] += noise.additive_noise_rms * rng.normal();
    }
  }
  return trace;
}

void write_trace_csv(std::ostream& os, const IQTrace& trace) {
  CsvWriter csv(os, {"t_us", "I", "Q", "blanked"});
  for (std::size_t j = 0; j < trace.size(); ++j) {
    csv.row({trace.t[j] * 1e6, trace.i[j], trace.q[j], static_cast<double>(trace.blanked[j])});
  }
}

WindowMean integrate_window(const IQTrace& trace, const Window& w) {
  if (!(w.end > w.start)) throw ConfigError("window end must be after its start");
  if (trace.size() == 0 || w.start < trace.t.front() - kTimeSlack ||
      w.end > trace.t.back() + kTimeSlack) {
    throw ConfigError("window lies outside the trace");
  }
  double si = 0.0;
  double sq = 0.0;
  std::size_t n = 0;
  const double tol = 1e-6 * trace.sample_interval;
  for (std::size_t j = 0; j < trace.size(); ++j) {
    if (trace.t[j] < w.start - tol || trace.t[j] > w.end + tol) continue;
    if (trace.blanked[j]) {
      throw ConfigError("window [" + std::to_string(w.start * 1e6) + ", " +
                        std::to_string(w.end * 1e6) + "] us overlaps a blanked region");
    }
    si += trace.i[j];
    sq += trace.q[j];
    ++n;
  }
  if (n == 0) throw ConfigError("window holds no samples");
  return {si / static_cast<double>(n), sq / static_cast<double>(n)};
}

void check_windows(const MeasurementWindows& windows, const Timeline& timeline,
                   double recovery_time) {
  for (std::size_t a = 0; a < windows.w.size(); ++a) {
    const Window& w = windows.w[a];
    if (!(w.end > w.start)) throw ConfigError("window w" + std::to_string(a + 1) + " is empty");
    for (std::size_t b = a + 1; b < windows.w.size(); ++b) {
      const Window& v = windows.w[b];
      if (w.start < v.end && v.start < w.end) {
        throw ConfigError("windows w" + std::to_string(a + 1) + " and w" + std::to_string(b + 1) +
                          " overlap");
      }
    }
    for (const auto& e : timeline.events()) {
      if (w.start < e.end() + recovery_time - kTimeSlack && e.start <= w.end + kTimeSlack) {
        throw ConfigError("window w" + std::to_string(a + 1) + " overlaps a blanked region");
      }
    }
    if (w.start < 0.0 || w.end > timeline.total_duration() + kTimeSlack) {
      throw ConfigError("window w" + std::to_string(a + 1) + " lies outside the timeline");
    }
  }
}

MeasurementWindows default_windows(const Timeline& timeline, const WindowLayout& l) {
  const auto& ev = timeline.events();
  if (ev.size() != 3) throw ConfigError("default_windows needs a three-pulse tomography timeline");
  auto fid_start = [&](const TimelineEvent& e) {
    return e.start + std::max(e.pulse.duration(), l.min_pulse_slot) + l.recovery_time;
  };
  MeasurementWindows m;
  m.w[0] = {fid_start(ev[0]), fid_start(ev[0]) + l.fid_span};
  m.w[1] = {ev[2].start - l.echo_lead, ev[2].start - l.echo_gap};
  m.w[2] = {fid_start(ev[2]), fid_start(ev[2]) + l.fid_span};
  check_windows(m, timeline, l.recovery_time);
  return m;
}

}  // namespace eqt
