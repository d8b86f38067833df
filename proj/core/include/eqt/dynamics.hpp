#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "eqt/bloch.hpp"
#include "eqt/pulses.hpp"

namespace eqt {

// Rotation convention (fixed):
//  * ground state |0> sits at -z;
//  * a pulse with phase phi drives rotation about (sin phi, cos phi, 0), with the
//    sense that an in-phase pi/2 pulse maps (0,0,-1) to (1,0,0);
//  * free evolution multiplies x + iy by exp(+i detuning t).
// Equivalently db/dt = W x b with W = (-rabi sin phi, -rabi cos phi, detuning).

/// Rigid on-resonance rotation by `area` radians for a pulse of phase `phase`.
BlochVector rotate(const BlochVector& b, double phase, double area);

/// Exact evolution under constant drive: rotation by sqrt(rabi^2 + detuning^2) dt
/// about the tilted field axis.
BlochVector propagate_const(const BlochVector& b, double rabi, double phase, double detuning,
                            double dt);

/// Free precession: (x + iy) -> (x + iy) exp(+i detuning t), z unchanged.
BlochVector free_evolve(const BlochVector& b, double detuning, double t);

/// Optional phenomenological decay for free evolution. Off by default.
struct Relaxation {
  double t1 = std::numeric_limits<double>::infinity();
  double t2 = std::numeric_limits<double>::infinity();
  bool enabled() const { return t1 < std::numeric_limits<double>::infinity() ||
                                t2 < std::numeric_limits<double>::infinity(); }
};

BlochVector free_evolve(const BlochVector& b, double detuning, double t, const Relaxation& decay);

struct IntegratorOptions {
  /// Step bound as a fraction of the pulse duration.
  double max_step_fraction = 1e-3;
  /// Step bound as rotation angle per step at the largest generalized Rabi frequency.
  double max_rotation = 0.01;
};

/// Number of fixed RK4 steps used for `env` when the largest generalized Rabi
/// frequency met is `max_generalized_rabi`.
std::size_t shaped_step_count(const PulseEnvelope& env, double max_generalized_rabi,
                              const IntegratorOptions& options = {});

/// Fixed-step classic RK4 integration of the Bloch equation through `env`.
BlochVector propagate_shaped(const BlochVector& b, const PulseEnvelope& env, double detuning,
                             double rabi_scale = 1.0, const IntegratorOptions& options = {});

/// Same as propagate_shaped with an explicit step count.
BlochVector propagate_shaped_steps(const BlochVector& b, const PulseEnvelope& env,
                                   double detuning, double rabi_scale, std::size_t steps);

/// Excited-state population (1 + z)/2 after driving the ground state through `env`.
double excitation_probability(const PulseEnvelope& env, double detuning, double rabi_scale = 1.0,
                              const IntegratorOptions& options = {});

/// Exact for square pulses, RK4 otherwise.
BlochVector propagate_pulse(const BlochVector& b, const PulseEnvelope& env, double detuning,
                            double rabi_scale = 1.0);

/// RK4 propagator with the envelope pre-sampled at every node, for applying one
/// pulse to many ions. The step is chosen once from the largest detuning and
/// rabi_scale it will be asked to handle.
class ShapedPropagator {
 public:
  ShapedPropagator(const PulseEnvelope& env, double max_abs_detuning, double max_rabi_scale,
                   const IntegratorOptions& options = {});

  BlochVector propagate(const BlochVector& b, double detuning, double rabi_scale = 1.0) const;
  double excitation_probability(double detuning, double rabi_scale = 1.0) const;
  std::size_t steps() const { return steps_; }

 private:
  double step_ = 0.0;
  std::size_t steps_ = 0;
  double sin_phase_ = 0.0;
  double cos_phase_ = 1.0;
  std::vector<double> nodes_;  ///< amplitude at t = k h / 2, k = 0..2*steps
};

/// Applies each pulse of a timeline: exact for square pulses, a shared
/// ShapedPropagator for shaped ones.
class TimelinePropagator {
 public:
  TimelinePropagator(const Timeline& timeline, double max_abs_detuning, double max_rabi_scale);

  const Timeline& timeline() const { return timeline_; }
  BlochVector apply_pulse(std::size_t event, const BlochVector& b, double detuning,
                          double rabi_scale = 1.0) const;
  /// State at t_end starting from `b` at t = 0. t_end must not fall inside a pulse.
  BlochVector evolve(const BlochVector& b, double detuning, double rabi_scale, double t_end) const;

 private:
  Timeline timeline_;
  std::vector<std::optional<ShapedPropagator>> shaped_;
};

/// One-off TimelinePropagator::evolve.
BlochVector evolve_timeline(const BlochVector& b, const Timeline& timeline, double detuning,
                            double rabi_scale, double t_end);

}  // namespace eqt
