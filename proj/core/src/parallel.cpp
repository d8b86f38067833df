#include "eqt/parallel.hpp"

namespace eqt {

std::size_t resolve_workers(std::size_t requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {
double tree_sum(std::span<const double> v) {
  if (v.size() <= kChunkSize) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  // Split on a chunk boundary so the tree shape is fixed by the length alone.
  const std::size_t chunks = (v.size() + kChunkSize - 1) / kChunkSize;
  const std::size_t mid = (chunks / 2) * kChunkSize;
  return tree_sum(v.subspan(0, mid)) + tree_sum(v.subspan(mid));
}
}  // namespace

double pairwise_sum(std::span<const double> values) { return tree_sum(values); }

}  // namespace eqt
