#pragma once

#include <cstdint>

namespace eqt {

/// Tags separating independent random streams drawn from one user seed.
enum class StreamPurpose : std::uint64_t {
  kEnsemble = 1,
  kPosition = 2,
  kTrench = 3,
  kRepump = 4,
  kNarrowing = 5,
  kRabiSelect = 6,
  kNoise = 7,
  kShifts = 8,
  kStates = 9,
};

/// Counter-based random stream. Every draw is a pure function of
/// (key, counter), so a stream keyed by (seed, purpose, index) yields the same
/// values no matter which thread consumes it or in what order streams are built.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index,
               std::uint64_t sub = 0);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; std::normal_distribution is not
  /// reproducible across standard libraries.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t v);

}  // namespace eqt
