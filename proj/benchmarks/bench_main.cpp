#include <benchmark/benchmark.h>

#include <vector>

#include "eqt/detection.hpp"
#include "eqt/dynamics.hpp"
#include "eqt/ensemble.hpp"
#include "eqt/interactions.hpp"
#include "eqt/tomography.hpp"

using namespace eqt;

namespace {

IonEnsemble spike(std::size_t n) {
  EnsembleSpec spec;
  spec.n_ions = n;
  return sample_ensemble(spec);
}

void BM_PropagateShaped(benchmark::State& state) {
  const PulseEnvelope p = PulseEnvelope::sinc_diff({2.6e6, 1.3e6, 87573.8, 42e3}, 80e-6, 0.0);
  const ShapedPropagator prop(p, kHz(500.0), 1.5);
  double det = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop.excitation_probability(det, 1.0));
    det += 1.0;
  }
}
BENCHMARK(BM_PropagateShaped);

void BM_PropagateConst(benchmark::State& state) {
  BlochVector b = BlochVector::ground();
  for (auto _ : state) {
    b = propagate_const(b, kHz(250.0), 0.1, kHz(20.0), 1e-6);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_PropagateConst);

void BM_SynthesizeTrace(benchmark::State& state) {
  const IonEnsemble e = spike(static_cast<std::size_t>(state.range(0)));
  const Timeline tl = tomography_timeline(square_pulse(kPi / 2, 1e-6, 0.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize_trace(e, tl, NoiseModel{}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SynthesizeTrace)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SampleShifts(benchmark::State& state) {
  InteractionModel m;
  m.perturber_density = density_from_separation(2.5, 1e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_shifts(m, 10000, static_cast<std::size_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SampleShifts)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RunEcho(benchmark::State& state) {
  const IonEnsemble e = spike(10000);
  InteractionModel m;
  m.perturber_density = density_from_separation(2.5, 1e-6);
  const std::vector<double> shifts = sample_shifts(m, 100000, 64, 1);
  EchoExperiment x;
  x.timing = PerturbTiming::kAfterPi;
  for (auto _ : state) benchmark::DoNotOptimize(run_echo(e, x, shifts));
}
BENCHMARK(BM_RunEcho)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
