#include <benchmark/benchmark.h>

#include "hessbar/kernels.hpp"
#include "hessbar/rng.hpp"

namespace {

using namespace hessbar;

Vec random_interior(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed, "bench-point");
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(0.05, 1.0);
  return x;
}

void BM_MetricGibbs(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const std::vector<Kernel> kernels = replicate(make_gibbs(0.0), n);
  const Vec x = random_interior(n, 1);
  for (auto _ : state) {
    DiagonalMetric metric = metric_at(kernels, x);
    benchmark::DoNotOptimize(metric.h_inv_diag.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_MetricTsallis(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const std::vector<Kernel> kernels = replicate(make_tsallis(0.1, 1.5), n);
  const Vec x = random_interior(n, 2);
  for (auto _ : state) {
    DiagonalMetric metric = metric_at(kernels, x);
    benchmark::DoNotOptimize(metric.h_inv_diag.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_ThetaSecondSingle(benchmark::State& state) {
  const Kernel kernel = make_mixture(0.2, 0.75);
  double t = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel.theta_second(t));
    t = t < 1.0 ? t + 1e-9 : 0.37;
  }
}

}  // namespace

BENCHMARK(BM_MetricGibbs)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_MetricTsallis)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_ThetaSecondSingle);
