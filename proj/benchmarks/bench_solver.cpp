#include <benchmark/benchmark.h>

#include "frmr/decomp.hpp"
#include "frmr/manifold.hpp"
#include "frmr/synth.hpp"

using namespace frmr;

namespace {

void BM_FixedRankStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int r = static_cast<int>(state.range(1));
  const SyntheticProblem p = generate_problem(n, n, r, 0.0, 1);
  PolarFactors f = identity_factors(n, n, r);
  for (auto _ : state) {
    f = fixed_rank_opt_step(p.m, f);
    benchmark::DoNotOptimize(f.b.b);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FixedRankStep)
    ->Args({200, 10})
    ->Args({500, 10})
    ->Args({1000, 10})
    ->Args({500, 50});

void BM_TruncatedSvd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int r = static_cast<int>(state.range(1));
  const SyntheticProblem p = generate_problem(n, n, r, 0.0, 1);
  for (auto _ : state) {
    const SvdTriplet t = tsvd_oracle(p.m, r);
    benchmark::DoNotOptimize(t.sigma);
  }
}
BENCHMARK(BM_TruncatedSvd)->Args({200, 10})->Args({500, 10});

void BM_SoftThreshold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SyntheticProblem p = generate_problem(n, n, 5, 0.3, 2);
  for (auto _ : state) {
    const Matrix s = soft_threshold(p.m, 0.1);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SoftThreshold)->Arg(500)->Arg(1000);

void BM_FullSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SyntheticProblem p = generate_problem(n, n, 10, 0.1, 3);
  for (auto _ : state) {
    const Decomposition d = fr_adm(p.m, 10);
    benchmark::DoNotOptimize(d.iterations);
  }
}
BENCHMARK(BM_FullSolve)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SubsampledSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SyntheticProblem p = generate_problem(n, n, 10, 0.1, 3);
  for (auto _ : state) {
    const Decomposition d = fr_nys(p.m, 10, {}, NystromConfig{10, 1e-12, 4});
    benchmark::DoNotOptimize(d.iterations);
  }
}
BENCHMARK(BM_SubsampledSolve)
    ->Arg(500)
    ->Arg(1000)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
