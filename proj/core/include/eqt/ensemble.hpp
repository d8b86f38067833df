#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eqt/bloch.hpp"
#include "eqt/units.hpp"

namespace eqt {

/// Ground hyperfine levels tracked for population bookkeeping.
enum class GroundLevel : std::size_t { kHalf = 0, kThreeHalf = 1, kFiveHalf = 2 };
inline constexpr std::size_t kNumGroundLevels = 3;

/// Position in nanometres.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Ion {
  std::uint64_t id = 0;       ///< index in the originally sampled ensemble; keys RNG streams
  double detuning = 0.0;      ///< rad/s relative to the laser
  double rabi_scale = 1.0;    ///< multiplies the nominal Rabi frequency
  std::array<double, kNumGroundLevels> populations{0.0, 0.0, 1.0};
  BlochVector bloch = BlochVector::ground();
  std::optional<Position> position;

  double population(GroundLevel l) const { return populations[static_cast<std::size_t>(l)]; }
  /// Optically active: sits in the +-5/2 ground level addressed by the laser.
  bool active() const { return population(GroundLevel::kFiveHalf) > 0.99; }
  void move_to(GroundLevel l) {
    populations = {0.0, 0.0, 0.0};
    populations[static_cast<std::size_t>(l)] = 1.0;
  }
};

struct IonEnsemble {
  std::vector<Ion> ions;

  std::size_t size() const { return ions.size(); }
  bool empty() const { return ions.empty(); }
  std::size_t active_count() const;
  IonEnsemble active_only() const;
  std::vector<double> detunings() const;
  std::vector<double> rabi_scales() const;
};

namespace profile {
struct Rectangular {
  double width = 0.0;  ///< full width, rad/s
};
struct Lorentzian {
  double fwhm = 0.0;  ///< rad/s
};
/// Lorentzian antihole truncated to the burned trench.
struct TrenchWithAntihole {
  double trench_width = 0.0;  ///< rad/s
  double antihole_fwhm = 0.0;  ///< rad/s
};
}  // namespace profile

using DetuningProfile =
    std::variant<profile::Rectangular, profile::Lorentzian, profile::TrenchWithAntihole>;

std::string profile_name(const DetuningProfile& p);

struct EnsembleSpec {
  std::size_t n_ions = 10000;
  DetuningProfile detuning_profile = profile::Rectangular{kHz(50.0)};
  double rabi_spread = 0.1;  ///< fractional half-width of the uniform rabi_scale distribution
  double nominal_rabi = kDefaultPeakRabi;  ///< rad/s
  std::uint64_t seed = 1;
  double density = 0.0;  ///< ions per nm^3; > 0 also samples positions
};

/// Throws ParameterError naming the offending field.
void validate(const EnsembleSpec& spec);

/// Draws the ensemble; ion i uses its own stream keyed by (seed, i).
IonEnsemble sample_ensemble(const EnsembleSpec& spec, std::size_t workers = 1);

/// Weighted mean of the per-ion Bloch vectors; weights are normalized internally.
BlochVector ensemble_mean_bloch(const IonEnsemble& ensemble, std::span<const double> weights);

}  // namespace eqt
