#pragma once

#include <cmath>
#include <iosfwd>

namespace eqt {

/// Real 3-vector describing a single two-level state in the rotating frame.
/// Ground state is (0, 0, -1).
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = -1.0;

  static constexpr BlochVector ground() { return {0.0, 0.0, -1.0}; }
  static constexpr BlochVector zero() { return {0.0, 0.0, 0.0}; }

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
  BlochVector cross(const BlochVector& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }

  BlochVector& operator+=(const BlochVector& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  BlochVector& operator-=(const BlochVector& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  BlochVector& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend BlochVector operator+(BlochVector a, const BlochVector& b) { return a += b; }
  friend BlochVector operator-(BlochVector a, const BlochVector& b) { return a -= b; }
  friend BlochVector operator*(BlochVector a, double s) { return a *= s; }
  friend BlochVector operator*(double s, BlochVector a) { return a *= s; }
  friend BlochVector operator/(BlochVector a, double s) { return a *= 1.0 / s; }
  friend BlochVector operator-(const BlochVector& a) { return {-a.x, -a.y, -a.z}; }
  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// Numerical slack allowed on |b| <= 1 for physical states.
inline constexpr double kBlochNormSlack = 1e-9;

double distance(const BlochVector& a, const BlochVector& b);

std::ostream& operator<<(std::ostream& os, const BlochVector& b);

}  // namespace eqt
