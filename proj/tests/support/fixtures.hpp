#pragma once

#include "eqt/pulses.hpp"
#include "eqt/spectral_prep.hpp"

namespace fixture {

/// Default 500 kHz / 25 kHz / 80 us narrowing pulse, synthesized once per process.
inline const eqt::PulseEnvelope& narrowing_pulse() {
  static const eqt::PulseEnvelope pulse = [] {
    const eqt::NarrowingPlan n;
    return eqt::synthesize_zero_area(eqt::hertz(n.band_outer), eqt::hertz(n.band_inner),
                                     n.duration, n.synthesis);
  }();
  return pulse;
}

}  // namespace fixture
