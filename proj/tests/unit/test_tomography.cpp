#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "eqt/dynamics.hpp"
#include "eqt/error.hpp"
#include "eqt/random.hpp"
#include "eqt/tomography.hpp"

using namespace eqt;
using cd = std::complex<double>;

namespace {

IonEnsemble ideal_ion() {
  IonEnsemble e;
  e.ions.resize(1);
  return e;
}

TomographySetup quiet_setup() {
  TomographySetup s;
  s.noise = {0.0, 0.0};
  return s;
}

const double kR = 1.0 / std::sqrt(2.0);

void expect_bloch(const BlochVector& a, const BlochVector& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

}  // namespace

TEST(TargetState, NormalizationAndPhase) {
  EXPECT_THROW(TargetState(cd(1, 0), cd(1, 0)), ParameterError);
  const TargetState s(cd(0, kR), cd(kR, 0));
  EXPECT_NEAR(s.alpha().imag(), 0.0, 1e-15);
  EXPECT_GE(s.alpha().real(), 0.0);
  EXPECT_NEAR(s.beta().imag(), -kR, 1e-15);
  double corr = 0;
  const TargetState n = TargetState::normalized(cd(2, 0), cd(0, 0), &corr);
  EXPECT_NEAR(n.alpha().real(), 1.0, 1e-15);
  EXPECT_NEAR(corr, 3.0, 1e-15);
  EXPECT_THROW(TargetState::normalized(cd(0, 0), cd(0, 0)), ParameterError);
}

TEST(TargetState, BlochMapping) {
  expect_bloch(state_to_bloch({cd(1, 0), cd(0, 0)}), {0, 0, -1}, 1e-15);
  expect_bloch(state_to_bloch({cd(kR, 0), cd(kR, 0)}), {1, 0, 0}, 1e-15);
  expect_bloch(state_to_bloch({cd(kR, 0), cd(0, kR)}), {0, 1, 0}, 1e-15);
  expect_bloch(state_to_bloch({cd(0, 0), cd(1, 0)}), {0, 0, 1}, 1e-15);
}

TEST(PrepRotation, ReferenceStates) {
  EXPECT_EQ(prep_rotation_for_state({cd(1, 0), cd(0, 0)}).area, 0.0);
  const PrepRotation plus = prep_rotation_for_state({cd(kR, 0), cd(kR, 0)});
  EXPECT_NEAR(plus.area, kPi / 2, 1e-12);
  EXPECT_NEAR(plus.phase, 0.0, 1e-12);
  const TargetState canberra(cd(std::cos(0.960), 0), std::sin(0.960) * std::polar(1.0, 2.60));
  const PrepRotation c = prep_rotation_for_state(canberra);
  EXPECT_NEAR(c.area, 1.920, 1e-12);
  expect_bloch(rotate(BlochVector::ground(), c.phase, c.area), state_to_bloch(canberra), 1e-12);
}

TEST(PrepRotation, RandomStatesReachedByRotation) {
  for (std::uint64_t k = 0; k < 100; ++k) {
    const TargetState s = haar_random_state(3, k);
    const PrepRotation r = prep_rotation_for_state(s);
    EXPECT_GE(r.area, 0.0);
    EXPECT_LE(r.area, kPi);
    expect_bloch(rotate(BlochVector::ground(), r.phase, r.area), state_to_bloch(s), 1e-12);
  }
}

TEST(PrepPulse, DurationsAndZeroPulse) {
  const PulseEnvelope plus = prep_pulse_for_state({cd(kR, 0), cd(kR, 0)});
  EXPECT_NEAR(plus.duration(), 1e-6, 1e-15);
  EXPECT_NEAR(plus.square_amplitude(), kHz(250.0), 1e-6);
  const PulseEnvelope zero = prep_pulse_for_state({cd(1, 0), cd(0, 0)});
  EXPECT_NEAR(zero.duration(), 1e-6, 1e-15);
  EXPECT_EQ(zero.peak(), 0.0);
}

TEST(Haar, DeterministicAndUniform) {
  EXPECT_EQ(haar_random_state(1, 5).beta(), haar_random_state(1, 5).beta());
  double sz = 0, sz2 = 0, sx = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const BlochVector b = state_to_bloch(haar_random_state(2, static_cast<std::uint64_t>(k)));
    sz += b.z;
    sz2 += b.z * b.z;
    sx += b.x;
  }
  // Uniform on the sphere: <z> = <x> = 0, <z^2> = 1/3.
  EXPECT_NEAR(sz / n, 0.0, 5 * std::sqrt(1.0 / 3 / n));
  EXPECT_NEAR(sx / n, 0.0, 5 * std::sqrt(1.0 / 3 / n));
  EXPECT_NEAR(sz2 / n, 1.0 / 3, 0.01);
}

TEST(RunTomography, IdealWindowSigns) {
  const TomographySetup setup = quiet_setup();
  const auto check = [&](const TargetState& s, RawWindows expect) {
    const RawWindows raw = run_tomography(ideal_ion(), s, setup, 0).raw;
    for (int w = 0; w < 3; ++w) {
      EXPECT_NEAR(raw[w].i, expect[w].i, 1e-9) << "w" << w + 1;
      EXPECT_NEAR(raw[w].q, expect[w].q, 1e-9) << "w" << w + 1;
    }
  };
  check({cd(kR, 0), cd(kR, 0)}, {{{-1, 0}, {1, 0}, {0, 0}}});
  check({cd(1, 0), cd(0, 0)}, {{{0, 0}, {0, 0}, {1, 0}}});
  check({cd(0, 0), cd(1, 0)}, {{{0, 0}, {0, 0}, {-1, 0}}});
}

TEST(Estimate, ClosedFormMatchesSolver) {
  RandomStream r(6, StreamPurpose::kStates, 9);
  for (int k = 0; k < 100; ++k) {
    RawWindows raw;
    for (auto& w : raw) w = {r.uniform(-2, 2), r.uniform(-2, 2)};
    const double s = r.uniform(0.2, 3.0);
    const BlochEstimate e = estimate_bloch(raw, uniform_calibration(s));
    EXPECT_NEAR(e.r.x, (raw[1].i - raw[0].i) / (2 * s), 1e-10);
    EXPECT_NEAR(e.r.y, (raw[0].q + raw[1].q + raw[2].q) / (3 * s), 1e-10);
    EXPECT_NEAR(e.r.z, -raw[2].i / s, 1e-10);
  }
}

TEST(Estimate, ReferenceCases) {
  const BlochEstimate plus = estimate_bloch({{{-2, 0}, {2, 0}, {0, 0}}}, uniform_calibration(2));
  expect_bloch(plus.r, {1, 0, 0}, 1e-15);
  EXPECT_NEAR(plus.residual, 0.0, 1e-15);
  const BlochEstimate y = estimate_bloch({{{0, 0.3}, {0, 0.3}, {0, 0.3}}}, uniform_calibration(1));
  EXPECT_NEAR(y.r.y, 0.3, 1e-15);
  const BlochEstimate zero = estimate_bloch({}, uniform_calibration(1));
  EXPECT_EQ(zero.r.norm(), 0.0);
  ScaleCalibration bad = uniform_calibration(1);
  bad.gains[1] = 0.0;
  EXPECT_THROW(estimate_bloch({}, bad), ParameterError);
}

TEST(Fidelity, ReferenceCases) {
  const TargetState plus(cd(kR, 0), cd(kR, 0));
  BlochEstimate e;
  e.r = {1, 0, 0};
  e.r_normalized = e.r;
  EXPECT_NEAR(fidelity(plus, e, false), 1.0, 1e-15);
  e.r = {-1, 0, 0};
  e.r_normalized = e.r;
  EXPECT_NEAR(fidelity(plus, e, false), 0.0, 1e-15);
  e.r = {0, 0, 0};
  EXPECT_NEAR(fidelity(plus, e, false), 0.5, 1e-15);
  EXPECT_THROW(fidelity(plus, e, true), EstimationError);
  e.r = {2, 0, 0};
  EXPECT_NEAR(fidelity(plus, e, false), 1.0, 1e-15);
}

TEST(Calibrate, IdealScaleExact) {
  TomographySetup setup = quiet_setup();
  setup.trace.emission_scale = 1.7;
  const ScaleCalibration c = calibrate(ideal_ion(), setup);
  EXPECT_NEAR(c.scale, 1.7, 1e-12);
  for (double g : c.gains) EXPECT_NEAR(g, 1.7, 1e-12);
}

TEST(Calibrate, JitterAveragesDown) {
  TomographySetup setup;
  setup.noise = {0.1, 0.0};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    setup.trace.seed = seed;
    EXPECT_NEAR(calibrate(ideal_ion(), setup).scale, 1.0, 0.1);
  }
  EXPECT_THROW(calibrate(IonEnsemble{}, setup), CalibrationError);
}

TEST(Table1, StatesAndIdealFidelity) {
  const auto states = table1_states();
  ASSERT_EQ(states.size(), 7u);
  EXPECT_TRUE(std::any_of(states.begin(), states.end(),
                          [](const NamedState& s) { return s.label == "|0>"; }));
  const FidelityReport r = table1_experiment(ideal_ion(), quiet_setup());
  for (const StateResult& s : r.states) {
    EXPECT_GE(s.worst_raw_fidelity, 0.999) << s.target.label;
    EXPECT_GE(s.worst_normalized_fidelity, 0.999) << s.target.label;
    EXPECT_EQ(s.repeats.size(), 3u);
  }
  std::ostringstream os;
  r.write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "state,fidelity,fidelity_assuming_pure_state");
}

TEST(Table1, SeedFixedRunIsReproducible) {
  EnsembleSpec spec;
  spec.n_ions = 500;
  const IonEnsemble e = sample_ensemble(spec);
  TomographySetup setup;
  setup.repeats = 2;
  setup.calibration_shots = 3;
  EXPECT_EQ(table1_experiment(e, setup).to_json(), table1_experiment(e, setup).to_json());
}
