#pragma once

#include <numbers>

namespace eqt {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
constexpr double angular(double hz) { return kTwoPi * hz; }
/// Angular frequency (rad/s) to ordinary frequency (Hz).
constexpr double hertz(double rad_per_s) { return rad_per_s / kTwoPi; }

constexpr double kHz(double v) { return angular(v * 1e3); }
constexpr double MHz(double v) { return angular(v * 1e6); }
constexpr double us(double v) { return v * 1e-6; }
constexpr double ms(double v) { return v * 1e-3; }

/// Peak Rabi frequency the pulse modulation system supports.
inline constexpr double kDefaultPeakRabi = kHz(250.0);
/// Peak Rabi frequency available from the laser; used for spectral shaping pulses.
inline constexpr double kAvailablePeakRabi = kHz(500.0);

}  // namespace eqt
