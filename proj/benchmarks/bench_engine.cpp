#include <benchmark/benchmark.h>

#include "g4v/lindblad.hpp"
#include "g4v/link.hpp"
#include "g4v/metrics.hpp"

using namespace g4v;

namespace {

ModelConstants bench_constants() {
  ModelConstants c = ModelConstants::from_rate(50e9, 4.0, 3e3);
  double lam = c.gamma_s_inv * (2.0 * c.nbar + 1.0);
  return ModelConstants::from_rate(50e9, 4.0, 3e3, lam);
}

DensityOperator plus_state() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(1) = 1.0 / std::sqrt(2.0);
  return DensityOperator::from_pure(PureState(SystemShape::single(4), v));
}

void BM_BuildGenerator(benchmark::State& state) {
  ModelConstants c = bench_constants();
  for (auto _ : state) benchmark::DoNotOptimize(build_generator(c).matrix(0, 0));
}
BENCHMARK(BM_BuildGenerator);

void BM_SpectralPropagator(benchmark::State& state) {
  ModelConstants c = bench_constants();
  Liouvillian lv = build_generator(c);
  double t = 1.0 / (c.gamma_s_inv * (2 * c.nbar + 1));
  for (auto _ : state)
    benchmark::DoNotOptimize(spectral_propagator(lv, t).matrix(0, 0));
}
BENCHMARK(BM_SpectralPropagator);

void BM_Rk4Evolve1000Steps(benchmark::State& state) {
  ModelConstants c = bench_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  DensityOperator rho = plus_state();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        rk4_evolve(rho, c, 1.0 / lam, 1e-3 / lam).matrix(0, 0));
}
BENCHMARK(BM_Rk4Evolve1000Steps);

void BM_KrausEvolve1000Steps(benchmark::State& state) {
  ModelConstants c = bench_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  KrausSet ks = kraus_set(c, 1e-3 / lam);
  DensityOperator rho = plus_state();
  for (auto _ : state)
    benchmark::DoNotOptimize(kraus_evolve(rho, ks, 1000).matrix(0, 0));
}
BENCHMARK(BM_KrausEvolve1000Steps);

void BM_TwoSpinPropagator(benchmark::State& state) {
  ModelConstants c = bench_constants();
  double lam = c.gamma_s_inv * (2 * c.nbar + 1);
  Propagator e = spectral_propagator(build_generator(c), 1.0 / lam);
  for (auto _ : state)
    benchmark::DoNotOptimize(multi_spin_propagator(e, 2).matrix(0, 0));
}
BENCHMARK(BM_TwoSpinPropagator);

void BM_HeraldedSwapDualRail(benchmark::State& state) {
  LinkConfig cfg;
  cfg.length_km = 30.0;
  cfg.encoding = RailEncoding::dual_rail;
  for (auto _ : state)
    benchmark::DoNotOptimize(heralded_swap(cfg).success_prob);
}
BENCHMARK(BM_HeraldedSwapDualRail);

void BM_HashingBoundTwoSpin(benchmark::State& state) {
  LinkConfig cfg;
  cfg.length_km = 30.0;
  DensityOperator rho = heralded_swap(cfg).rho;
  for (auto _ : state) benchmark::DoNotOptimize(hashing_bound(rho, 4, 4));
}
BENCHMARK(BM_HashingBoundTwoSpin);

}  // namespace

BENCHMARK_MAIN();
