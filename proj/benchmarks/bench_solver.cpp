#include <benchmark/benchmark.h>

#include "hessbar/solver.hpp"

namespace {

using namespace hessbar;

void BM_SolveNonconvexQp(benchmark::State& state) {
  const Problem problem = random_nonconvex_qp(20, 5, 5, 42);
  SolverConfig config;
  config.max_iterations = state.range(0);
  for (auto _ : state) {
    SolveReport report =
        hba_solve(problem, *problem.default_start(), make_gibbs(0.0), config);
    benchmark::DoNotOptimize(report.final_x.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SolveSimplexProjection(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Vec target = Vec::Constant(n, 1.0 / static_cast<double>(n));
  target[0] *= 2.0;
  target /= target.sum();
  const Problem problem = make_quadratic(
      Mat::Identity(n, n), -target, ConstraintSystem(Mat::Ones(1, n), Vec::Ones(1)));
  const Vec x0 = Vec::Constant(n, 1.0 / static_cast<double>(n));
  SolverConfig config;
  config.max_iterations = 200;
  for (auto _ : state) {
    SolveReport report = hba_solve(problem, x0, make_gibbs(0.0), config);
    benchmark::DoNotOptimize(report.final_x.data());
  }
}

}  // namespace

BENCHMARK(BM_SolveNonconvexQp)->Arg(50)->Arg(500);
BENCHMARK(BM_SolveSimplexProjection)->Arg(10)->Arg(1000);
