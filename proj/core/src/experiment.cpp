#include "hessbar/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "hessbar/errors.hpp"
#include "hessbar/plot.hpp"
#include "hessbar/trace_io.hpp"

namespace hessbar {

namespace {

using nlohmann::json;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json solver_summary(const SolveReport& report, double wall_seconds) {
  json js;
  js["termination"] = to_string(report.termination);
  js["iterations"] = report.iterations();
  js["final_f"] = report.final_f();
  js["wall_seconds"] = wall_seconds;
  js["kkt"] = {{"complementarity", report.final_kkt.complementarity},
               {"dual_feasibility_violation", report.final_kkt.dual_feasibility_violation}};
  if (!report.error_message.empty()) js["error"] = report.error_message;
  return js;
}

}  // namespace

double bootstrap_step_at(const Problem& problem, const Kernel& kernel, const Vec& x0,
                         const SolverConfig& config) {
  const std::vector<Kernel> kernels = kernels_for_problem(kernel, problem);
  const Vec grad = problem.gradient(x0);
  const DiagonalMetric metric = metric_at(kernels, x0);
  const GeometryResult geo = search_direction(problem.constraints(), metric, grad);
  double beta = std::numeric_limits<double>::infinity();
  for (const Kernel& k : kernels) beta = std::min(beta, k.curvature_floor());
  const double lipschitz_l =
      config.lipschitz_l > 0.0 ? config.lipschitz_l : problem.lipschitz();
  return bootstrap_step(alpha_zero(x0, geo.reduced_cost_r, kernels),
                        config.boundary_safety_tau, beta, lipschitz_l);
}

ExperimentResult run_experiment(const Problem& problem, const Kernel& kernel,
                                const ExperimentOptions& options,
                                const std::filesystem::path& out_dir) {
  if (!problem.default_start())
    throw ConfigError("experiment: the problem provides no start point");
  const Vec x0 = *problem.default_start();
  const double f0 = problem.value(x0);

  SolverConfig solver_config = options.solver;
  const bool can_plot_trajectory =
      problem.box_lift() && problem.box_lift()->box_dimension() == 2;
  if (options.emit_plots && can_plot_trajectory) solver_config.record_iterates = true;

  std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  const auto t0 = std::chrono::steady_clock::now();
  result.hba = hba_solve(problem, x0, kernel, solver_config);
  result.hba_wall_seconds = seconds_since(t0);
  result.trace_csv = out_dir / "trace.csv";
  write_trace_csv(result.trace_csv, result.hba.trace);

  if (options.run_md_baseline) {
    MdSchedule schedule = options.md_schedule;
    if (schedule.base_step <= 0.0)
      schedule.base_step = bootstrap_step_at(problem, kernel, x0, solver_config);
    const auto t1 = std::chrono::steady_clock::now();
    result.md = mirror_descent_solve(problem, x0, schedule, solver_config);
    result.md_wall_seconds = seconds_since(t1);
    result.md_trace_csv = out_dir / "md_trace.csv";
    write_trace_csv(*result.md_trace_csv, result.md->trace);
  }

  json summary;
  summary["label"] = options.label;
  summary["start_f"] = f0;
  summary["solver"] = solver_summary(result.hba, result.hba_wall_seconds);
  json notes = json::array();

  if (result.md) {
    summary["baseline"] = solver_summary(*result.md, result.md_wall_seconds);
    // Relative improvement of the main solver over the baseline, scaled by
    // the best available measure of total attainable progress from x0.
    const double f_hba = result.hba.final_f();
    const double f_md = result.md->final_f();
    const double denom = problem.known_optimum()
                             ? f0 - problem.known_optimum()->f_star
                             : f0 - f_md;
    if (denom > 0.0) {
      summary["relative_improvement"] = (f_md - f_hba) / denom;
    } else {
      summary["relative_improvement"] = nullptr;
      notes.push_back("relative improvement undefined: no measurable progress scale");
    }
  }

  if (options.fit_rate_report) {
    try {
      std::optional<KnownOptimum> known;
      if (problem.known_optimum()) known = *problem.known_optimum();
      result.rate = measure_rate(result.hba, kernel, known);
      summary["rate"] = {{"rho_predicted", result.rate->rho_predicted},
                         {"rho_fitted", result.rate->rho_fitted},
                         {"f_infinity_estimate", result.rate->f_infinity_estimate},
                         {"fit_window",
                          {{"first_k", result.rate->fit_window.first_k},
                           {"last_k", result.rate->fit_window.last_k},
                           {"points", result.rate->fit_window.points}}},
                         {"fit_r_squared", result.rate->fit_r_squared}};
    } catch (const InsufficientData& e) {
      summary["rate"] = nullptr;
      notes.push_back(std::string("rate fit skipped: ") + e.what());
    }
  }

  if (options.emit_plots) {
    std::vector<TraceSeries> series;
    series.push_back({"barrier solver", result.hba.trace});
    if (result.md) series.push_back({"mirror descent", result.md->trace});

    const auto value_path = out_dir / "value.svg";
    write_text_atomic(value_path, render_value_plot(series));
    result.plots.push_back(value_path);

    try {
      double f_inf;
      if (problem.known_optimum()) {
        f_inf = problem.known_optimum()->f_star;
      } else {
        f_inf = estimate_f_infinity(result.hba.trace, std::nullopt);
        if (result.md)
          f_inf = std::min(f_inf, estimate_f_infinity(result.md->trace, std::nullopt));
      }
      const auto gap_path = out_dir / "loglog_gap.svg";
      write_text_atomic(gap_path, render_loglog_gap_plot(series, f_inf));
      result.plots.push_back(gap_path);
    } catch (const ConfigError& e) {
      notes.push_back(std::string("log-log plot skipped: ") + e.what());
    }

    if (can_plot_trajectory && !result.hba.iterates.empty()) {
      const auto traj_path = out_dir / "trajectory.svg";
      write_text_atomic(traj_path, render_trajectory_plot(problem, result.hba));
      result.plots.push_back(traj_path);
    }
  }

  json artifacts = json::array();
  artifacts.push_back(result.trace_csv.filename().string());
  if (result.md_trace_csv) artifacts.push_back(result.md_trace_csv->filename().string());
  for (const auto& p : result.plots) artifacts.push_back(p.filename().string());
  summary["artifacts"] = std::move(artifacts);
  if (!notes.empty()) summary["notes"] = std::move(notes);

  result.summary = std::move(summary);
  result.summary_path = out_dir / "summary.json";
  write_text_atomic(result.summary_path, result.summary.dump(2) + "\n");
  return result;
}

int batch_thread_cap() {
  if (const char* env = std::getenv("HESSBAR_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || parsed < 1)
      throw ConfigError("HESSBAR_THREADS must be a positive integer");
    return static_cast<int>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void run_batch(std::vector<std::function<void()>> jobs) {
  const int cap = std::min<int>(batch_thread_cap(), static_cast<int>(jobs.size()));
  if (cap <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= jobs.size()) return;
      try {
        jobs[i]();
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(cap));
  for (int t = 0; t < cap; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hessbar
