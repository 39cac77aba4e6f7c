#pragma once

#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hessbar/kernels.hpp"
#include "hessbar/problems.hpp"
#include "hessbar/rate.hpp"
#include "hessbar/solver.hpp"

namespace hessbar {

struct ExperimentOptions {
  SolverConfig solver;
  bool run_md_baseline = false;
  // base_step <= 0 hands the baseline the main solver's first bootstrap step,
  // so the two methods move at the same scale from the shared start.
  MdSchedule md_schedule{0.0, false};
  bool fit_rate_report = false;
  bool emit_plots = true;
  std::string label = "run";
};

struct ExperimentResult {
  SolveReport hba;
  std::optional<SolveReport> md;
  std::optional<RateReport> rate;
  double hba_wall_seconds = 0.0;
  double md_wall_seconds = 0.0;
  std::filesystem::path trace_csv;
  std::optional<std::filesystem::path> md_trace_csv;
  std::vector<std::filesystem::path> plots;
  std::filesystem::path summary_path;
  nlohmann::json summary;
};

// Step the backtracking search would open with at x0 — boundary ratio test
// against the safety factor, capped by the curvature-over-smoothness bound.
double bootstrap_step_at(const Problem& problem, const Kernel& kernel, const Vec& x0,
                         const SolverConfig& config);

// One full artifact bundle in out_dir: trace CSV(s), summary JSON, plots.
// Deterministic given (problem, kernel, options) except for recorded wall
// times; solver numerical failures are captured in the summary (with the
// partial trace written), not rethrown.
ExperimentResult run_experiment(const Problem& problem, const Kernel& kernel,
                                const ExperimentOptions& options,
                                const std::filesystem::path& out_dir);

// Worker count for batch execution: HESSBAR_THREADS if set (positive integer,
// else ConfigError), otherwise the hardware concurrency.
int batch_thread_cap();

// Run independent jobs with at most batch_thread_cap() workers. The first
// exception thrown by any job is rethrown after all workers finish.
void run_batch(std::vector<std::function<void()>> jobs);

}  // namespace hessbar
