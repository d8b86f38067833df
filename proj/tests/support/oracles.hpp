#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's propagators or estimators.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "eqt/bloch.hpp"

namespace oracle {

using cd = std::complex<double>;
using Spinor = std::array<cd, 2>;  // amplitudes of |0>, |1>

inline constexpr double kPi = std::numbers::pi;

/// |0> at the south pole: z = |b|^2 - |a|^2, x + iy = 2 conj(a) b.
inline eqt::BlochVector to_bloch(const Spinor& s) {
  const cd c = 2.0 * std::conj(s[0]) * s[1];
  return {c.real(), c.imag(), std::norm(s[1]) - std::norm(s[0])};
}

inline Spinor ground() { return {cd(1.0, 0.0), cd(0.0, 0.0)}; }

/// exp(-i t (v . sigma) / 2) applied to s.
inline Spinor su2(const Spinor& s, double vx, double vy, double vz, double t) {
  const double n = std::sqrt(vx * vx + vy * vy + vz * vz);
  if (n == 0.0) return s;
  const double th = 0.5 * n * t;
  const double c = std::cos(th);
  const double sn = std::sin(th) / n;
  const cd i(0.0, 1.0);
  // v . sigma = [[vz, vx - i vy], [vx + i vy, -vz]]
  const cd m00 = c - i * sn * vz;
  const cd m01 = -i * sn * cd(vx, -vy);
  const cd m10 = -i * sn * cd(vx, vy);
  const cd m11 = c + i * sn * vz;
  return {m00 * s[0] + m01 * s[1], m10 * s[0] + m11 * s[1]};
}

/// Hamiltonian vector for drive amplitude `rabi`, phase `phase`, detuning
/// `det` in the convention where an in-phase pi/2 takes |0> to (|0>+|1>)/sqrt2.
inline Spinor drive(const Spinor& s, double rabi, double phase, double det, double t) {
  return su2(s, rabi * std::sin(phase), rabi * std::cos(phase), det, t);
}

/// Piecewise-constant (midpoint) propagation through a shaped envelope.
inline Spinor drive_shaped(Spinor s, const std::function<double(double)>& amplitude,
                           double duration, double phase, double det, std::size_t steps) {
  const double h = duration / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    s = drive(s, amplitude((static_cast<double>(k) + 0.5) * h), phase, det, h);
  }
  return s;
}

/// Composite Simpson integral of f over [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  n += n % 2;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
  return s * h / 3.0;
}

}  // namespace oracle
