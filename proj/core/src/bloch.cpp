#include "eqt/bloch.hpp"

#include <ostream>

namespace eqt {

double distance(const BlochVector& a, const BlochVector& b) { return (a - b).norm(); }

std::ostream& operator<<(std::ostream& os, const BlochVector& b) {
  return os << "(" << b.x << ", " << b.y << ", " << b.z << ")";
}

}  // namespace eqt
