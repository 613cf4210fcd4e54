#include <benchmark/benchmark.h>

#include "ercomp/er_exact.hpp"
#include "ercomp/mc_sim.hpp"

using namespace ercomp;

// Exact law at t = 1/2; cost is dominated by the guard bits.
static void BM_ComponentDistExtended(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto ctx = PrecisionCtx::extended(256);
  BigFloat::PrecisionScope scope(ctx.bits);
  const auto params = GnpParams::from_t(n, ratio(1, 2));
  for (auto _ : state) benchmark::DoNotOptimize(component_dist<BigFloat>(params, ctx));
  state.SetComplexityN(n);
}
BENCHMARK(BM_ComponentDistExtended)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

static void BM_ComponentDistRational(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto ctx = PrecisionCtx::exact_rational();
  for (auto _ : state) benchmark::DoNotOptimize(component_dist_p(n, ratio(1, 10), ctx));
}
BENCHMARK(BM_ComponentDistRational)->Arg(12)->Arg(24)->Arg(48)->Unit(benchmark::kMicrosecond);

// One G(n, t/n) draw with union-find, t = 2.
static void BM_SampleComponents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double p = 2.0 / n;
  auto rng = Xoshiro256pp::for_replica(1, 0);
  UnionFind ws;
  for (auto _ : state) benchmark::DoNotOptimize(sample_components(n, p, rng, ws));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SampleComponents)->RangeMultiplier(10)->Range(1000, 100000);

static void BM_RigidSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto rng = Xoshiro256pp::for_replica(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rigid_sample(n, 0.8, rng));
}
BENCHMARK(BM_RigidSample)->Arg(200)->Arg(500)->Arg(5000);
BENCHMARK_MAIN();
