// Command-line harness: solve problems, generate routing instances, run
// benchmark suites, fit convergence rates, and render plots.
//
// Exit codes: 0 success, 2 numerical failure inside a solve, 3 invalid
// configuration or input data.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hessbar/errors.hpp"
#include "hessbar/experiment.hpp"
#include "hessbar/plot.hpp"
#include "hessbar/rate.hpp"
#include "hessbar/serialize.hpp"
#include "hessbar/tap.hpp"
#include "hessbar/trace_io.hpp"
#include "nlohmann/json.hpp"

namespace {

using namespace hessbar;
using nlohmann::json;

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw ConfigError("cannot open file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

// "auto" -> nullopt; anything else must parse fully as a double.
std::optional<double> parse_limit_flag(const std::string& text) {
  if (text == "auto") return std::nullopt;
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("--f-inf expects 'auto' or a number, got: " + text);
  return value;
}

struct KernelFlags {
  std::string name = "gibbs";
  double beta = 0.0;
  double p = 1.5;
  double gamma = 0.75;
  std::string file;
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& flags) {
  auto* name = cmd->add_option("--kernel", flags.name,
                               "Barrier kernel family: gibbs|tsallis|burg|mixture")
                   ->check(CLI::IsMember({"gibbs", "tsallis", "burg", "mixture"}));
  cmd->add_option("--kernel-beta", flags.beta, "Quadratic regularization weight");
  cmd->add_option("--kernel-p", flags.p, "Tsallis exponent in (1,2)");
  cmd->add_option("--kernel-gamma", flags.gamma, "Mixture weight in [1/2,1]");
  cmd->add_option("--kernel-file", flags.file, "Kernel config JSON (overrides flags)")
      ->excludes(name);
}

Kernel kernel_from_flags(const KernelFlags& flags) {
  if (!flags.file.empty()) return kernel_from_json(load_json_file(flags.file));
  if (flags.name == "gibbs") return make_gibbs(flags.beta);
  if (flags.name == "tsallis") return make_tsallis(flags.beta, flags.p);
  if (flags.name == "burg") return make_burg(flags.beta);
  if (flags.name == "mixture") return make_mixture(flags.beta, flags.gamma);
  throw ConfigError("unknown kernel family: " + flags.name);
}

struct SolverFlags {
  std::int64_t max_iterations = 100000;
  double tol_comp = 1e-8;
  double tol_dir = 1e-12;
  double lipschitz = 0.0;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--max-iters", flags.max_iterations, "Iteration budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-comp", flags.tol_comp, "Complementarity stop tolerance");
  cmd->add_option("--tol-dir", flags.tol_dir, "Direction-norm stop tolerance");
  cmd->add_option("--lipschitz", flags.lipschitz,
                  "Gradient Lipschitz bound override (<=0: use the problem's)");
}

SolverConfig solver_config_from_flags(const SolverFlags& flags) {
  SolverConfig config;
  config.max_iterations = flags.max_iterations;
  config.tol_complementarity = flags.tol_comp;
  config.tol_direction = flags.tol_dir;
  config.lipschitz_l = flags.lipschitz;
  return config;
}

void print_experiment_outcome(const ExperimentResult& result) {
  const auto& solver = result.summary.at("solver");
  std::cout << "termination:  " << solver.at("termination").get<std::string>() << "\n"
            << "iterations:   " << solver.at("iterations").get<std::int64_t>() << "\n"
            << "final f:      " << format_double(solver.at("final_f").get<double>())
            << "\n";
  if (result.summary.contains("baseline") && result.summary.at("baseline").is_object()) {
    std::cout << "baseline f:   "
              << format_double(
                     result.summary.at("baseline").at("final_f").get<double>())
              << "\n";
  }
  if (result.rate) {
    std::cout << "fitted rate:  " << format_double(result.rate->rho_fitted)
              << " (predicted " << format_double(result.rate->rho_predicted) << ")\n";
  }
  std::cout << "summary:      " << result.summary_path.string() << "\n";
}

// Nonzero when the solve finished in a numerically failed state without
// throwing (the report carries the diagnosis).
int experiment_exit_code(const ExperimentResult& result) {
  return result.hba.termination == Termination::NumericalFailure ? 2 : 0;
}

int run_solve(const std::string& input_path, const KernelFlags& kernel_flags,
              const SolverFlags& solver_flags, const std::string& out_dir,
              const std::string& tap_mode, bool with_md, double md_step, bool md_sqrt,
              bool with_rate, bool no_plots, const std::string& label) {
  const json spec_js = load_json_file(input_path);

  Problem problem = [&]() {
    if (spec_js.contains("vertices")) {
      // Routing instance file: build the path-flow problem in the chosen mode.
      auto instance =
          std::make_shared<const TapInstance>(tap_instance_from_json(spec_js));
      const TapObjectiveMode mode = (tap_mode == "latency")
                                        ? TapObjectiveMode::TotalEdgeLatency
                                        : TapObjectiveMode::PathCostSum;
      return make_tap_problem(std::move(instance), mode);
    }
    return problem_from_json(spec_js);
  }();

  ExperimentOptions options;
  options.solver = solver_config_from_flags(solver_flags);
  options.run_md_baseline = with_md;
  options.md_schedule = MdSchedule{md_step, md_sqrt};
  options.fit_rate_report = with_rate;
  options.emit_plots = !no_plots;
  options.label = label;

  const Kernel kernel = kernel_from_flags(kernel_flags);
  const ExperimentResult result = run_experiment(problem, kernel, options, out_dir);
  print_experiment_outcome(result);
  return experiment_exit_code(result);
}

int run_tap_gen(const TapGenParams& params, const std::string& out_path) {
  const TapInstance instance = generate_tap_instance(params);
  write_text_atomic(out_path, tap_instance_to_json(instance).dump(2) + "\n");
  std::cout << "vertices:     " << instance.num_vertices() << "\n"
            << "edges:        " << instance.edges().size() << "\n"
            << "od pairs:     " << instance.od_pairs().size() << "\n"
            << "path count:   " << instance.total_paths() << "\n"
            << "instance:     " << out_path << "\n";
  return 0;
}

int run_benchmark(const std::string& suite, std::uint64_t seed,
                  const SolverFlags& solver_flags, const std::string& out_root) {
  struct Job {
    std::string name;
    Problem problem;
    bool md;
  };
  std::vector<Job> jobs;

  if (suite == "rosenbrock") {
    jobs.push_back({"rosenbrock", make_rosenbrock_box(), true});
  } else if (suite == "beale") {
    jobs.push_back({"beale", make_beale_box(), true});
  } else if (suite == "qp") {
    // Two convex and two indefinite instances on seeds derived from --seed.
    jobs.push_back({"qp-convex-a", random_convex_qp(40, 8, seed), false});
    jobs.push_back({"qp-convex-b", random_convex_qp(40, 8, seed + 1), false});
    jobs.push_back({"qp-nonconvex-a", random_nonconvex_qp(40, 8, 4, seed + 2), false});
    jobs.push_back({"qp-nonconvex-b", random_nonconvex_qp(40, 8, 4, seed + 3), false});
  } else if (suite == "tap") {
    TapGenParams params;
    params.seed = seed;
    auto instance = std::make_shared<const TapInstance>(generate_tap_instance(params));
    jobs.push_back({"tap-pathcost",
                    make_tap_problem(instance, TapObjectiveMode::PathCostSum), true});
    jobs.push_back({"tap-latency",
                    make_tap_problem(instance, TapObjectiveMode::TotalEdgeLatency),
                    true});
  } else {
    throw ConfigError("unknown benchmark suite: " + suite);
  }

  std::vector<ExperimentResult> results(jobs.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    tasks.push_back([&, i]() {
      ExperimentOptions options;
      options.solver = solver_config_from_flags(solver_flags);
      options.run_md_baseline = jobs[i].md;
      options.fit_rate_report = true;
      options.label = jobs[i].name;
      results[i] = run_experiment(jobs[i].problem, make_gibbs(0.0), options,
                                  std::filesystem::path(out_root) / jobs[i].name);
    });
  }
  run_batch(std::move(tasks));

  int exit_code = 0;
  for (const auto& result : results) {
    std::cout << "== " << result.summary.at("label").get<std::string>() << " ==\n";
    print_experiment_outcome(result);
    exit_code = std::max(exit_code, experiment_exit_code(result));
  }
  return exit_code;
}

int run_rate_fit(const std::string& trace_path, const std::string& f_inf_flag,
                 double tail_fraction) {
  const auto trace = read_trace_csv(trace_path);
  const std::optional<double> known = parse_limit_flag(f_inf_flag);
  std::optional<KnownOptimum> reference;
  if (known) reference = KnownOptimum{Vec{}, *known};
  const double f_inf = estimate_f_infinity(trace, reference);
  const RateFit fit = fit_rate(trace, f_inf, tail_fraction);
  const json report = {{"rho_fitted", fit.rho},
                       {"log_c", fit.log_c},
                       {"r_squared", fit.r_squared},
                       {"f_infinity", f_inf},
                       {"window",
                        {{"first_k", fit.window.first_k},
                         {"last_k", fit.window.last_k},
                         {"points", fit.window.points}}}};
  std::cout << report.dump(2) << "\n";
  return 0;
}

int run_plot(const std::vector<std::string>& trace_paths, const std::string& kind,
             const std::string& f_inf_flag, const std::string& out_path) {
  std::vector<TraceSeries> series;
  for (const auto& path : trace_paths) {
    series.push_back(
        {std::filesystem::path(path).stem().string(), read_trace_csv(path)});
  }
  std::string svg;
  if (kind == "value") {
    svg = render_value_plot(series);
  } else if (kind == "loglog") {
    const std::optional<double> fixed = parse_limit_flag(f_inf_flag);
    double f_inf;
    if (fixed) {
      f_inf = *fixed;
    } else {
      f_inf = std::numeric_limits<double>::infinity();
      for (const auto& s : series)
        f_inf = std::min(f_inf, estimate_f_infinity(s.trace, std::nullopt));
    }
    svg = render_loglog_gap_plot(series, f_inf);
  } else if (kind == "traj") {
    throw UnsupportedKind(
        "trajectory plots need iterate coordinates, which trace CSVs do not carry; "
        "run `solve` with plots enabled on a two-dimensional boxed problem instead");
  } else {
    throw ConfigError("unknown plot kind: " + kind);
  }
  write_text_atomic(out_path, svg);
  std::cout << "plot:         " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interior-point barrier method harness"};
  app.require_subcommand(1);
  int exit_code = 0;

  // --- solve ---
  auto* solve = app.add_subcommand(
      "solve", "Run the barrier solver on a problem or routing-instance JSON file");
  std::string solve_input;
  solve->add_option("input", solve_input, "Problem JSON (or routing instance JSON)")
      ->required();
  KernelFlags solve_kernel;
  add_kernel_flags(solve, solve_kernel);
  SolverFlags solve_solver;
  add_solver_flags(solve, solve_solver);
  std::string solve_out = "hessbar-out";
  solve->add_option("--out", solve_out, "Artifact output directory");
  std::string solve_tap_mode = "pathcost";
  solve
      ->add_option("--tap-objective", solve_tap_mode,
                   "Objective for routing instances: pathcost|latency")
      ->check(CLI::IsMember({"pathcost", "latency"}));
  bool solve_md = false;
  solve->add_flag("--md", solve_md, "Also run the mirror-descent baseline");
  double solve_md_step = 0.0;
  solve->add_option("--md-step", solve_md_step,
                    "Baseline step size (default: match the solver's opening step)");
  bool solve_md_sqrt = false;
  solve->add_flag("--md-sqrt", solve_md_sqrt, "Baseline uses step/sqrt(k+1)");
  bool solve_rate = false;
  solve->add_flag("--rate", solve_rate, "Fit the empirical convergence rate");
  bool solve_no_plots = false;
  solve->add_flag("--no-plots", solve_no_plots, "Skip plot emission");
  std::string solve_label = "run";
  solve->add_option("--label", solve_label, "Label recorded in the summary");
  solve->callback([&]() {
    exit_code = run_solve(solve_input, solve_kernel, solve_solver, solve_out,
                          solve_tap_mode, solve_md, solve_md_step, solve_md_sqrt,
                          solve_rate, solve_no_plots, solve_label);
  });

  // --- tap-gen ---
  auto* tap_gen =
      app.add_subcommand("tap-gen", "Generate a random routing instance JSON file");
  TapGenParams tap_params;
  tap_gen->add_option("--vertices", tap_params.num_vertices, "Graph vertex count")
      ->check(CLI::PositiveNumber);
  tap_gen->add_option("--od-pairs", tap_params.num_od_pairs, "Origin/destination pairs")
      ->check(CLI::PositiveNumber);
  tap_gen->add_option("--paths", tap_params.paths_per_pair, "Paths requested per pair")
      ->check(CLI::PositiveNumber);
  tap_gen
      ->add_option("--attachment", tap_params.attachment_m,
                   "Preferential-attachment edges per new vertex")
      ->check(CLI::PositiveNumber);
  std::uint64_t tap_seed = 0;
  tap_gen->add_option("--seed", tap_seed, "Generator seed");
  std::string tap_out;
  tap_gen->add_option("--out", tap_out, "Output instance path")->required();
  tap_gen->callback([&]() {
    tap_params.seed = tap_seed;
    exit_code = run_tap_gen(tap_params, tap_out);
  });

  // --- benchmark ---
  auto* benchmark =
      app.add_subcommand("benchmark", "Run a predefined experiment suite");
  std::string bench_suite;
  benchmark
      ->add_option("--suite", bench_suite, "Suite name: rosenbrock|beale|qp|tap")
      ->required()
      ->check(CLI::IsMember({"rosenbrock", "beale", "qp", "tap"}));
  std::uint64_t bench_seed = 0;
  benchmark->add_option("--seed", bench_seed, "Base seed for generated instances");
  SolverFlags bench_solver;
  bench_solver.max_iterations = 1500;
  add_solver_flags(benchmark, bench_solver);
  std::string bench_out = "hessbar-bench";
  benchmark->add_option("--out", bench_out, "Artifact output root directory");
  benchmark->callback([&]() {
    exit_code = run_benchmark(bench_suite, bench_seed, bench_solver, bench_out);
  });

  // --- rate-fit ---
  auto* rate_fit = app.add_subcommand(
      "rate-fit", "Fit the tail convergence rate of a recorded trace");
  std::string rate_trace;
  rate_fit->add_option("trace", rate_trace, "Trace CSV path")->required();
  std::string rate_f_inf = "auto";
  rate_fit->add_option("--f-inf", rate_f_inf,
                       "Objective limit: 'auto' or an explicit value");
  double rate_tail = 0.5;
  rate_fit->add_option("--tail-fraction", rate_tail,
                       "Fraction of usable points fitted, in (0,1]");
  rate_fit->callback(
      [&]() { exit_code = run_rate_fit(rate_trace, rate_f_inf, rate_tail); });

  // --- plot ---
  auto* plot = app.add_subcommand("plot", "Render trace CSVs to a vector graphic");
  std::vector<std::string> plot_traces;
  plot->add_option("traces", plot_traces, "Trace CSV paths")->required();
  std::string plot_kind = "value";
  plot->add_option("--kind", plot_kind, "Plot kind: value|loglog|traj")
      ->check(CLI::IsMember({"value", "loglog", "traj"}));
  std::string plot_f_inf = "auto";
  plot->add_option("--f-inf", plot_f_inf,
                   "Objective limit for the gap plot: 'auto' or a value");
  std::string plot_out = "plot.svg";
  plot->add_option("--out", plot_out, "Output SVG path");
  plot->callback(
      [&]() { exit_code = run_plot(plot_traces, plot_kind, plot_f_inf, plot_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const hessbar::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const hessbar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const hessbar::GenerationFailed& e) {
    std::cerr << "generation failed: " << e.what() << "\n";
    return 3;
  } catch (const hessbar::InsufficientData& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
