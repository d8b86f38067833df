#include "eqt/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "eqt/error.hpp"

namespace eqt {

namespace {

/// Right-handed rotation of b about unit axis u by angle a (Rodrigues).
BlochVector rodrigues(const BlochVector& b, const BlochVector& u, double a) {
  const double c = std::cos(a);
  const double s = std::sin(a);
  return b * c + u.cross(b) * s + u * (u.dot(b) * (1.0 - c));
}

struct Field {
  double wx, wy, wz;
  BlochVector apply(const BlochVector& b) const {
    return {wy * b.z - wz * b.y, wz * b.x - wx * b.z, wx * b.y - wy * b.x};
  }
};

inline BlochVector rk4_step(const BlochVector& b, double sp, double cp, double detuning, double a0,
                            double am, double a1, double h) {
  const Field f0{-a0 * sp, -a0 * cp, detuning};
  const Field fm{-am * sp, -am * cp, detuning};
  const Field f1{-a1 * sp, -a1 * cp, detuning};
  const BlochVector k1 = f0.apply(b);
  const BlochVector k2 = fm.apply(b + k1 * (0.5 * h));
  const BlochVector k3 = fm.apply(b + k2 * (0.5 * h));
  const BlochVector k4 = f1.apply(b + k3 * h);
  return b + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
}

}  // namespace

BlochVector rotate(const BlochVector& b, double phase, double area) {
  // Rotation by +area about -(sin phi, cos phi, 0).
  const BlochVector axis{-std::sin(phase), -std::cos(phase), 0.0};
  return rodrigues(b, axis, area);
}

BlochVector propagate_const(const BlochVector& b, double rabi, double phase, double detuning,
                            double dt) {
  if (dt < 0.0) throw ParameterError("propagate_const: dt must be >= 0");
  const BlochVector w{-rabi * std::sin(phase), -rabi * std::cos(phase), detuning};
  const double omega = w.norm();
  if (omega == 0.0 || dt == 0.0) return b;
  return rodrigues(b, w * (1.0 / omega), omega * dt);
}

BlochVector free_evolve(const BlochVector& b, double detuning, double t) {
  if (t < 0.0) throw ParameterError("free_evolve: t must be >= 0");
  const double c = std::cos(detuning * t);
  const double s = std::sin(detuning * t);
  return {b.x * c - b.y * s, b.x * s + b.y * c, b.z};
}

BlochVector free_evolve(const BlochVector& b, double detuning, double t, const Relaxation& decay) {
  BlochVector out = free_evolve(b, detuning, t);
  if (!decay.enabled()) return out;
  const double e2 = std::exp(-t / decay.t2);
  const double e1 = std::exp(-t / decay.t1);
  out.x *= e2;
  out.y *= e2;
  out.z = -1.0 + (out.z + 1.0) * e1;
  return out;
}

std::size_t shaped_step_count(const PulseEnvelope& env, double max_generalized_rabi,
                              const IntegratorOptions& options) {
  double h = env.duration() * options.max_step_fraction;
  if (max_generalized_rabi > 0.0) h = std::min(h, options.max_rotation / max_generalized_rabi);
  return static_cast<std::size_t>(std::ceil(env.duration() / h - 1e-9));
}

BlochVector propagate_shaped_steps(const BlochVector& b, const PulseEnvelope& env,
                                   double detuning, double rabi_scale, std::size_t steps) {
  if (steps == 0) throw ParameterError("propagate_shaped: need at least one step");
  const double h = env.duration() / static_cast<double>(steps);
  const double sp = std::sin(env.phase());
  const double cp = std::cos(env.phase());
  BlochVector out = b;
  double a0 = rabi_scale * env.amplitude(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const double am = rabi_scale * env.amplitude(t + 0.5 * h);
    const double a1 = rabi_scale * env.amplitude(static_cast<double>(k + 1) * h);
    out = rk4_step(out, sp, cp, detuning, a0, am, a1, h);
    a0 = a1;
  }
  return out;
}

BlochVector propagate_shaped(const BlochVector& b, const PulseEnvelope& env, double detuning,
                             double rabi_scale, const IntegratorOptions& options) {
  const double peak = std::abs(rabi_scale) * env.peak();
  const std::size_t steps = shaped_step_count(env, std::hypot(peak, detuning), options);
  return propagate_shaped_steps(b, env, detuning, rabi_scale, steps);
}

double excitation_probability(const PulseEnvelope& env, double detuning, double rabi_scale,
                              const IntegratorOptions& options) {
  const BlochVector b = propagate_shaped(BlochVector::ground(), env, detuning, rabi_scale, options);
  return std::clamp(0.5 * (1.0 + b.z), 0.0, 1.0);
}

BlochVector propagate_pulse(const BlochVector& b, const PulseEnvelope& env, double detuning,
                            double rabi_scale) {
  if (env.kind() == PulseKind::kSquare) {
    return propagate_const(b, rabi_scale * env.square_amplitude(), env.phase(), detuning,
                           env.duration());
  }
  return propagate_shaped(b, env, detuning, rabi_scale);
}

ShapedPropagator::ShapedPropagator(const PulseEnvelope& env, double max_abs_detuning,
                                   double max_rabi_scale, const IntegratorOptions& options)
    : sin_phase_(std::sin(env.phase())), cos_phase_(std::cos(env.phase())) {
  const double peak = std::abs(max_rabi_scale) * env.peak();
  steps_ = shaped_step_count(env, std::hypot(peak, max_abs_detuning), options);
  step_ = env.duration() / static_cast<double>(steps_);
  nodes_.resize(2 * steps_ + 1);
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    nodes_[k] = env.amplitude(0.5 * step_ * static_cast<double>(k));
  }
}

BlochVector ShapedPropagator::propagate(const BlochVector& b, double detuning,
                                        double rabi_scale) const {
  BlochVector out = b;
  for (std::size_t k = 0; k < steps_; ++k) {
    out = rk4_step(out, sin_phase_, cos_phase_, detuning, rabi_scale * nodes_[2 * k],
                   rabi_scale * nodes_[2 * k + 1], rabi_scale * nodes_[2 * k + 2], step_);
  }
  return out;
}

double ShapedPropagator::excitation_probability(double detuning, double rabi_scale) const {
  const BlochVector b = propagate(BlochVector::ground(), detuning, rabi_scale);
  return std::clamp(0.5 * (1.0 + b.z), 0.0, 1.0);
}

TimelinePropagator::TimelinePropagator(const Timeline& timeline, double max_abs_detuning,
                                       double max_rabi_scale)
    : timeline_(timeline) {
  for (const auto& e : timeline_.events()) {
    if (e.pulse.kind() == PulseKind::kSquare) {
      shaped_.emplace_back();
    } else {
      shaped_.emplace_back(std::in_place, e.pulse, max_abs_detuning, max_rabi_scale);
    }
  }
}

BlochVector TimelinePropagator::apply_pulse(std::size_t event, const BlochVector& b,
                                            double detuning, double rabi_scale) const {
  const auto& shaped = shaped_.at(event);
  if (shaped) return shaped->propagate(b, detuning, rabi_scale);
  return propagate_pulse(b, timeline_.events()[event].pulse, detuning, rabi_scale);
}

BlochVector TimelinePropagator::evolve(const BlochVector& b, double detuning, double rabi_scale,
                                       double t_end) const {
  BlochVector out = b;
  double t = 0.0;
  const auto& events = timeline_.events();
  for (std::size_t k = 0; k < events.size() && events[k].start < t_end; ++k) {
    if (events[k].end() > t_end * (1.0 + 1e-12)) {
      throw ParameterError("evolve: t_end falls inside a pulse");
    }
    out = free_evolve(out, detuning, events[k].start - t);
    out = apply_pulse(k, out, detuning, rabi_scale);
    t = events[k].end();
  }
  return free_evolve(out, detuning, std::max(0.0, t_end - t));
}

BlochVector evolve_timeline(const BlochVector& b, const Timeline& timeline, double detuning,
                            double rabi_scale, double t_end) {
  return TimelinePropagator(timeline, std::abs(detuning), std::abs(rabi_scale))
      .evolve(b, detuning, rabi_scale, t_end);
}

}  // namespace eqt
