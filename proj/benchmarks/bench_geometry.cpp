#include <benchmark/benchmark.h>

#include "hessbar/geometry.hpp"
#include "hessbar/kernels.hpp"
#include "hessbar/rng.hpp"

namespace {

using namespace hessbar;

// Block-simplex geometry at traffic-assignment scale: `blocks` demand rows,
// each spreading over `width` coordinates.
ConstraintSystem block_system(Eigen::Index blocks, Eigen::Index width) {
  Mat a = Mat::Zero(blocks, blocks * width);
  for (Eigen::Index i = 0; i < blocks; ++i)
    for (Eigen::Index j = 0; j < width; ++j) a(i, i * width + j) = 1.0;
  return ConstraintSystem(a, Vec::Ones(blocks));
}

void BM_DirectionBlockSimplex(benchmark::State& state) {
  const Eigen::Index blocks = state.range(0);
  const Eigen::Index width = 20;
  const ConstraintSystem cs = block_system(blocks, width);
  const Eigen::Index n = cs.cols();
  Rng rng(1, "bench-geo");
  Vec x(n), g(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(0.01, 1.0 / width);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = rng.normal();
  const std::vector<Kernel> kernels = replicate(make_gibbs(0.0), n);
  const DiagonalMetric metric = metric_at(kernels, x);
  for (auto _ : state) {
    GeometryResult geo = search_direction(cs, metric, g);
    benchmark::DoNotOptimize(geo.direction_v.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_DirectionGeneralDense(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index m = n / 4;
  Rng rng(2, "bench-geo-dense");
  Mat a(m, n);
  a.row(0).setOnes();
  for (Eigen::Index i = 1; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  Vec x(n), g(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(0.5, 1.5);
  const Vec b = a * x;
  const ConstraintSystem cs(a, b);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = rng.normal();
  const std::vector<Kernel> kernels = replicate(make_gibbs(0.0), n);
  const DiagonalMetric metric = metric_at(kernels, x);
  for (auto _ : state) {
    GeometryResult geo = search_direction(cs, metric, g);
    benchmark::DoNotOptimize(geo.direction_v.data());
  }
}

}  // namespace

BENCHMARK(BM_DirectionBlockSimplex)->Arg(10)->Arg(100)->Arg(500);
BENCHMARK(BM_DirectionGeneralDense)->Arg(20)->Arg(100)->Arg(400);
