// Acceptance gate: one pass/fail line per release criterion, exit 0 only if
// every criterion holds. Tolerances are pinned here, not configurable.
//
// Usage: acceptance <path-to-cli-binary>
// (the CLI path is needed by the determinism criterion, which reruns real
// commands and byte-compares their artifacts)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hessbar/errors.hpp"
#include "hessbar/experiment.hpp"
#include "hessbar/rate.hpp"
#include "hessbar/rng.hpp"
#include "hessbar/solver.hpp"
#include "hessbar/special_cases.hpp"
#include "hessbar/tap.hpp"
#include "hessbar/trace_io.hpp"
#include "test_utils.hpp"

using namespace hessbar;

namespace {

struct Criterion {
  int id = 0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double value) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(3) << value;
  return out.str();
}

// ---- shared invariant registry (criterion 3 audits every barrier-solver run
// executed anywhere in this binary) ----

struct InvariantSample {
  std::string label;
  double feasibility_tolerance = 0.0;
  InvariantDiagnostics diagnostics;
  bool trace_monotone = true;
};

std::vector<InvariantSample> g_invariant_samples;

double feasibility_tolerance(const Problem& problem) {
  const auto& cs = problem.constraints();
  const double b_norm = cs.rows() == 0 ? 0.0 : cs.rhs().cwiseAbs().maxCoeff();
  return 1e-8 * (1.0 + b_norm);
}

void register_run(const std::string& label, const Problem& problem,
                  const SolveReport& report) {
  InvariantSample sample;
  sample.label = label;
  sample.feasibility_tolerance = feasibility_tolerance(problem);
  sample.diagnostics = report.invariants;
  for (std::size_t i = 1; i < report.trace.size(); ++i) {
    if (!(report.trace[i].f_value <= report.trace[i - 1].f_value)) {
      sample.trace_monotone = false;
      break;
    }
  }
  g_invariant_samples.push_back(std::move(sample));
}

// ---- criterion 1: closed-form special cases ----

Criterion criterion_1() {
  Stopwatch timer;
  constexpr double kTol = 1e-10;
  constexpr double kTimeLimit = 10.0;
  double max_dev = 0.0;
  int count = 0;
  for (const SpecialCase which : {SpecialCase::LV, SpecialCase::RD, SpecialCase::AS}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      max_dev = std::max(max_dev,
                         check_special_case_equivalence(random_special_case(which, seed)));
      ++count;
    }
  }
  Criterion result{1};
  result.seconds = timer.seconds();
  result.pass = max_dev <= kTol && result.seconds < kTimeLimit;
  result.detail = "special-case equivalence: max deviation " + sci(max_dev) + " over " +
                  std::to_string(count) + " instances (tol " + sci(kTol) + ")";
  return result;
}

// ---- criterion 2: direction solver vs dense saddle-point oracle ----

Criterion criterion_2() {
  Stopwatch timer;
  constexpr double kTol = 1e-8;
  constexpr double kTimeLimit = 5.0;
  Rng rng(2026, "acceptance-kkt");
  double max_dev = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = rng.uniform_int(2, 6);
    const Eigen::Index m = rng.uniform_int(0, std::min<Eigen::Index>(3, n - 1));
    Vec h(n), g(n);
    for (Eigen::Index i = 0; i < n; ++i) h[i] = rng.uniform(0.1, 10.0);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = rng.normal();
    ConstraintSystem cs = ConstraintSystem::unconstrained(n);
    if (m > 0) {
      Mat a(m, n);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
      cs = ConstraintSystem(a, Vec::Zero(m));
    }
    const DiagonalMetric metric{h, h.cwiseInverse()};
    const GeometryResult geo = search_direction(cs, metric, g);
    const auto dense = testing::dense_kkt_direction(cs, h, g);
    max_dev =
        std::max(max_dev, (geo.direction_v - dense.direction_v).cwiseAbs().maxCoeff());
    if (m > 0)
      max_dev = std::max(max_dev, (geo.dual_y - dense.dual_y).cwiseAbs().maxCoeff());
  }
  Criterion result{2};
  result.seconds = timer.seconds();
  result.pass = max_dev <= kTol && result.seconds < kTimeLimit;
  result.detail = "direction vs dense saddle-point solve: max deviation " + sci(max_dev) +
                  " over 100 instances (tol " + sci(kTol) + ")";
  return result;
}

// ---- criterion 4: classic 2-D benchmarks at full budget ----

Criterion criterion_4() {
  Stopwatch timer;
  constexpr double kFTol = 1e-6;
  constexpr double kTimeLimitEach = 60.0;
  Criterion result{4};
  std::vector<std::string> parts;
  bool all_pass = true;
  for (const std::string name : {std::string("rosenbrock"), std::string("beale")}) {
    Stopwatch each;
    const Problem problem = name == "rosenbrock" ? make_rosenbrock_box() : make_beale_box();
    ExperimentOptions options;
    options.solver.max_iterations = 100000;
    options.label = name;
    const auto out_dir =
        std::filesystem::temp_directory_path() / ("hessbar-acceptance-" + name);
    std::filesystem::remove_all(out_dir);
    const ExperimentResult run = run_experiment(problem, make_gibbs(0.0), options, out_dir);
    register_run("criterion-4/" + name, problem, run.hba);
    const double elapsed = each.seconds();
    const double final_f = run.hba.final_f();
    bool monotone = true;
    for (std::size_t i = 1; i < run.hba.trace.size(); ++i)
      if (!(run.hba.trace[i].f_value <= run.hba.trace[i - 1].f_value)) monotone = false;
    bool plots_ok = run.plots.size() >= 2;  // value + log-log gap (+ trajectory)
    for (const auto& plot : run.plots)
      if (!std::filesystem::exists(plot)) plots_ok = false;
    const bool ok =
        final_f <= kFTol && monotone && plots_ok && elapsed < kTimeLimitEach;
    all_pass = all_pass && ok;
    parts.push_back(name + " final f " + sci(final_f) + (ok ? " <= " : " > ") +
                    sci(kFTol) + " in " +
                    std::to_string(run.hba.iterations()) + " iters, monotone=" +
                    (monotone ? "yes" : "no") + ", plots=" + (plots_ok ? "yes" : "no") +
                    " (" + sci(elapsed) + " s)");
  }
  result.seconds = timer.seconds();
  result.pass = all_pass;
  result.detail = parts[0] + "; " + parts[1];
  return result;
}

// ---- criterion 5: tail decay within the predicted k^-1 envelope ----

Criterion criterion_5() {
  Stopwatch timer;
  constexpr double kSlack = 1.1;
  constexpr double kTimeLimit = 300.0;
  int violating_runs = 0;
  int excluded_converged = 0;
  int excluded_stalled = 0;
  std::vector<double> fitted;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Problem problem = random_nonconvex_qp(20, 5, 5, seed);
    SolverConfig config;
    config.max_iterations = 2000;
    const SolveReport report =
        hba_solve(problem, *problem.default_start(), make_gibbs(0.0), config);
    register_run("criterion-5/seed-" + std::to_string(seed), problem, report);
    if (report.termination == Termination::ToleranceMet ||
        report.termination == Termination::StationaryStart) {
      // Reached stationarity within tolerance in finitely many steps: no
      // polynomial tail exists to fit.
      ++excluded_converged;
      continue;
    }
    if (report.termination == Termination::NumericalFailure) {
      // Line search stalled where the required decrease falls below the
      // rounding resolution of f: numerically stationary, likewise no tail.
      ++excluded_stalled;
      continue;
    }
    const double f_inf = estimate_f_infinity(report.trace, std::nullopt);
    const RateFit fit = fit_rate(report.trace, f_inf, 0.5);
    fitted.push_back(fit.rho);
    // Calibrate the envelope constant at the fit-window start, then demand
    // gap(k) <= slack * C / k at every later tail point.
    double c_envelope = 0.0;
    bool calibrated = false;
    bool violated = false;
    for (const IterationRecord& rec : report.trace) {
      if (rec.k < fit.window.first_k || rec.k > fit.window.last_k) continue;
      const double gap = rec.f_value - f_inf;
      if (!(gap > 0.0)) continue;
      if (!calibrated) {
        c_envelope = gap * static_cast<double>(rec.k);
        calibrated = true;
        continue;
      }
      if (gap > kSlack * c_envelope / static_cast<double>(rec.k)) violated = true;
    }
    if (violated) ++violating_runs;
  }
  std::sort(fitted.begin(), fitted.end());
  Criterion result{5};
  result.seconds = timer.seconds();
  result.pass = violating_runs == 0 && !fitted.empty() && result.seconds < kTimeLimit;
  std::string rho_summary = fitted.empty()
                                ? "none fitted"
                                : "fitted rate min/median/max " + sci(fitted.front()) +
                                      "/" + sci(fitted[fitted.size() / 2]) + "/" +
                                      sci(fitted.back());
  result.detail = "decay envelope (slack " + sci(kSlack) + "): " +
                  std::to_string(violating_runs) + " of " +
                  std::to_string(fitted.size()) + " fitted runs violate; excluded " +
                  std::to_string(excluded_converged) + " converged + " +
                  std::to_string(excluded_stalled) + " stalled at f's resolution; " +
                  rho_summary;
  return result;
}

// ---- criterion 6: routing benchmark vs uniform start and the baseline ----

Criterion criterion_6() {
  Stopwatch timer;
  constexpr double kReductionFloor = 0.90;
  constexpr std::int64_t kBudget = 1500;
  constexpr double kTimeLimit = 600.0;
  int reduction_ok = 0, baseline_ok = 0, both_ok = 0;
  std::vector<double> reductions;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TapGenParams params;  // 50 vertices, 100 pairs, 20 paths per pair
    params.seed = seed;
    auto instance = std::make_shared<const TapInstance>(generate_tap_instance(params));
    const Problem problem =
        make_tap_problem(instance, TapObjectiveMode::TotalEdgeLatency);
    const Vec x0 = instance->uniform_start();
    const double f0 = problem.value(x0);
    SolverConfig config;
    config.max_iterations = kBudget;
    const SolveReport hba = hba_solve(problem, x0, make_gibbs(0.0), config);
    register_run("criterion-6/seed-" + std::to_string(seed), problem, hba);
    const double md_step = bootstrap_step_at(problem, make_gibbs(0.0), x0, config);
    const SolveReport md =
        mirror_descent_solve(problem, x0, MdSchedule{md_step, false}, config);

    const double reduction = (f0 - hba.final_f()) / f0;
    reductions.push_back(reduction);
    const bool a = reduction >= kReductionFloor;
    // "At least as good as the baseline" is judged at the same relative
    // granularity the optimality criteria use (1e-6): at matched constant
    // steps the two trajectories agree to ~7 significant digits, so anything
    // inside that band is a tie, not a loss.
    const bool b = hba.final_f() - md.final_f() <= 1e-6 * (1.0 + std::abs(md.final_f()));
    reduction_ok += a;
    baseline_ok += b;
    both_ok += (a && b);
  }
  std::sort(reductions.begin(), reductions.end());
  Criterion result{6};
  result.seconds = timer.seconds();
  result.pass = both_ok >= 18 && result.seconds < kTimeLimit;
  result.detail =
      "routing (50 vertices, 100 pairs, 20 paths, budget " + std::to_string(kBudget) +
      "): latency reduction >= 90% on " + std::to_string(reduction_ok) +
      "/20 seeds (min/median/max " + sci(reductions.front()) + "/" +
      sci(reductions[reductions.size() / 2]) + "/" + sci(reductions.back()) +
      "), solver <= baseline on " + std::to_string(baseline_ok) + "/20, both on " +
      std::to_string(both_ok) + "/20 (need 18)";
  return result;
}

// ---- criterion 7: convex problems reach their global optimum ----

Criterion criterion_7() {
  Stopwatch timer;
  constexpr double kTol = 1e-6;
  int failures = 0;
  double worst_rel = 0.0;
  SolverConfig config;
  config.max_iterations = 20000;

  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const Problem problem = random_convex_qp(20, 5, 500 + seed);
    const SolveReport report =
        hba_solve(problem, *problem.default_start(), make_gibbs(0.0), config);
    register_run("criterion-7/qp-" + std::to_string(seed), problem, report);
    const double f_star = problem.known_optimum()->f_star;
    const double rel = std::abs(report.final_f() - f_star) / (1.0 + std::abs(f_star));
    worst_rel = std::max(worst_rel, rel);
    failures += rel > kTol;
  }

  // Routing instances are convex in both modes; the optimum reference is a
  // ten-times-longer run of the same solver.
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    TapGenParams params;
    params.num_vertices = 20;
    params.num_od_pairs = 20;
    params.paths_per_pair = 8;
    params.seed = 900 + seed;
    auto instance = std::make_shared<const TapInstance>(generate_tap_instance(params));
    const Problem problem =
        make_tap_problem(instance, TapObjectiveMode::TotalEdgeLatency);
    const Vec x0 = instance->uniform_start();
    SolverConfig short_config;
    short_config.max_iterations = 2000;
    SolverConfig long_config;
    long_config.max_iterations = 20000;
    const SolveReport run = hba_solve(problem, x0, make_gibbs(0.0), short_config);
    const SolveReport reference = hba_solve(problem, x0, make_gibbs(0.0), long_config);
    register_run("criterion-7/tap-" + std::to_string(seed), problem, run);
    register_run("criterion-7/tap-ref-" + std::to_string(seed), problem, reference);
    const double f_star = reference.final_f();
    const double rel = std::abs(run.final_f() - f_star) / (1.0 + std::abs(f_star));
    worst_rel = std::max(worst_rel, rel);
    failures += rel > kTol;
  }

  Criterion result{7};
  result.seconds = timer.seconds();
  result.pass = failures == 0;
  result.detail = "convex optimality: " + std::to_string(failures) +
                  "/20 instances exceed relative " + sci(kTol) + " (worst " +
                  sci(worst_rel) + ")";
  return result;
}

// ---- criterion 8: finite-difference gradient oracles ----

Criterion criterion_8() {
  Stopwatch timer;
  constexpr double kTol = 1e-5;
  double worst = 0.0;
  int checked = 0;
  Rng rng(77, "acceptance-fd");

  const auto check_problem = [&](const Problem& problem) {
    const Vec x0 = *problem.default_start();
    for (int point = 0; point < 3; ++point) {
      Vec x = x0;
      if (point > 0)
        for (Eigen::Index i = 0; i < x.size(); ++i) x[i] *= rng.uniform(0.8, 1.2);
      worst = std::max(worst, testing::gradient_mismatch(problem, x));
      ++checked;
    }
  };

  check_problem(make_rosenbrock_box());
  check_problem(make_beale_box());
  check_problem(random_convex_qp(12, 3, 7));
  check_problem(random_nonconvex_qp(12, 3, 2, 8));
  {
    Mat q = Mat::Zero(3, 3);
    q(0, 0) = 2.0;
    q(1, 1) = 1.0;
    q(2, 2) = 4.0;
    Vec c(3);
    c << 1.0, -2.0, 0.5;
    Problem quad = make_quadratic(q, c, ConstraintSystem(Mat::Ones(1, 3), Vec::Ones(1)));
    quad.set_default_start(Vec::Constant(3, 1.0 / 3.0));
    check_problem(quad);
  }
  {
    const TapGenParams params{12, 6, 4, 2, 77};
    auto instance = std::make_shared<const TapInstance>(generate_tap_instance(params));
    check_problem(make_tap_problem(instance, TapObjectiveMode::PathCostSum));
    check_problem(make_tap_problem(instance, TapObjectiveMode::TotalEdgeLatency));
  }

  Criterion result{8};
  result.seconds = timer.seconds();
  result.pass = worst <= kTol;
  result.detail = "finite-difference gradients: worst relative mismatch " + sci(worst) +
                  " over " + std::to_string(checked) + " points (tol " + sci(kTol) + ")";
  return result;
}

// ---- criterion 9: CLI determinism (byte-identical traces on rerun) ----

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return "<missing:" + path.string() + ">";
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

Criterion criterion_9(const std::string& cli) {
  Stopwatch timer;
  Criterion result{9};
  const auto root = std::filesystem::temp_directory_path() / "hessbar-acceptance-cli";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  const std::string r = root.string();

  std::vector<std::string> problems;
  const auto run = [&](const std::string& args) {
    const std::string command = "cd " + r + " && " + cli + " " + args + " > /dev/null";
    const int status = std::system(command.c_str());
    if (status != 0) problems.push_back("command failed (" + args + ")");
  };
  const auto compare = [&](const std::string& rel_a, const std::string& rel_b) {
    if (read_file(root / rel_a) != read_file(root / rel_b))
      problems.push_back(rel_a + " != " + rel_b);
  };

  {
    std::ofstream out(root / "rosen.json", std::ios::binary);
    out << "{\"objective\": {\"type\": \"rosenbrock\"}}\n";
  }

  const std::string gen = "tap-gen --vertices 12 --od-pairs 6 --paths 4 --seed 7 --out ";
  run(gen + "inst_a.json");
  run(gen + "inst_b.json");
  compare("inst_a.json", "inst_b.json");

  const std::string tap_solve =
      "solve inst_a.json --tap-objective latency --md --rate --max-iters 300 --out ";
  run(tap_solve + "sol_a");
  run(tap_solve + "sol_b");
  compare("sol_a/trace.csv", "sol_b/trace.csv");
  compare("sol_a/md_trace.csv", "sol_b/md_trace.csv");

  const std::string rosen_solve = "solve rosen.json --max-iters 300 --out ";
  run(rosen_solve + "ros_a");
  run(rosen_solve + "ros_b");
  compare("ros_a/trace.csv", "ros_b/trace.csv");

  // std::system runs through the shell; set the parallelism cap inline so the
  // batch path is exercised under concurrency on both runs.
  const std::string bench =
      "HESSBAR_THREADS=2 " + cli + " benchmark --suite qp --seed 5 --max-iters 300 --out ";
  {
    const std::string cmd_a = "cd " + r + " && " + bench + "qp_a > /dev/null";
    const std::string cmd_b = "cd " + r + " && " + bench + "qp_b > /dev/null";
    if (std::system(cmd_a.c_str()) != 0) problems.push_back("benchmark run a failed");
    if (std::system(cmd_b.c_str()) != 0) problems.push_back("benchmark run b failed");
  }
  for (const std::string name :
       {std::string("qp-convex-a"), std::string("qp-convex-b"),
        std::string("qp-nonconvex-a"), std::string("qp-nonconvex-b")})
    compare("qp_a/" + name + "/trace.csv", "qp_b/" + name + "/trace.csv");

  {
    const std::string fit = cli + " rate-fit sol_a/trace.csv --f-inf auto > ";
    const std::string cmd_a = "cd " + r + " && " + fit + "rate_a.txt";
    const std::string cmd_b = "cd " + r + " && " + fit + "rate_b.txt";
    if (std::system(cmd_a.c_str()) != 0) problems.push_back("rate-fit run a failed");
    if (std::system(cmd_b.c_str()) != 0) problems.push_back("rate-fit run b failed");
  }
  compare("rate_a.txt", "rate_b.txt");

  const std::string plot =
      "plot sol_a/trace.csv sol_a/md_trace.csv --kind loglog --out ";
  run(plot + "plot_a.svg");
  run(plot + "plot_b.svg");
  compare("plot_a.svg", "plot_b.svg");

  result.seconds = timer.seconds();
  result.pass = problems.empty();
  if (result.pass) {
    result.detail =
        "CLI determinism: all rerun artifacts byte-identical (instances, traces, "
        "rate fits, plots)";
  } else {
    std::string joined;
    for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
    result.detail = "CLI determinism: " + joined;
  }
  return result;
}

// ---- criterion 3: audit the accumulated run diagnostics ----

Criterion criterion_3() {
  Criterion result{3};
  int violations = 0;
  std::string first_bad;
  for (const InvariantSample& sample : g_invariant_samples) {
    const auto& d = sample.diagnostics;
    std::string why;
    if (!(d.max_sufficient_decrease_violation <= 0.0)) why = "sufficient decrease";
    else if (!(d.max_feasibility_gap <= sample.feasibility_tolerance)) why = "feasibility";
    else if (!(d.min_coordinate > 0.0)) why = "positivity";
    else if (!(d.max_angle_deviation <= 1e-8)) why = "angle identity";
    else if (!(d.min_step_floor_slack >= -1e-12)) why = "step floor";
    else if (!sample.trace_monotone) why = "monotonicity";
    if (!why.empty()) {
      ++violations;
      if (first_bad.empty()) first_bad = sample.label + " (" + why + ")";
    }
  }
  result.pass = violations == 0 && !g_invariant_samples.empty();
  result.detail = "run invariants (decrease, feasibility, positivity, angle, step "
                  "floor, monotone trace): " +
                  std::to_string(violations) + " violations across " +
                  std::to_string(g_invariant_samples.size()) + " solver runs";
  if (violations > 0) result.detail += "; first: " + first_bad;
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli-binary>\n";
    return 2;
  }
  // The determinism commands cd into a scratch directory, so the CLI path
  // must survive the directory change.
  const std::string cli = std::filesystem::absolute(argv[1]).string();

  std::vector<Criterion> results;
  const auto note = [](int id) { std::cerr << "[criterion " << id << "] running...\n"; };

  try {
    note(1);
    results.push_back(criterion_1());
    note(2);
    results.push_back(criterion_2());
    note(4);
    results.push_back(criterion_4());
    note(5);
    results.push_back(criterion_5());
    note(6);
    results.push_back(criterion_6());
    note(7);
    results.push_back(criterion_7());
    note(8);
    results.push_back(criterion_8());
    note(9);
    results.push_back(criterion_9(cli));
    // Audits every run the criteria above executed; must come last.
    note(3);
    results.push_back(criterion_3());
  } catch (const std::exception& e) {
    std::cerr << "acceptance harness aborted: " << e.what() << "\n";
    return 2;
  }

  std::sort(results.begin(), results.end(),
            [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
  int passed = 0;
  for (const Criterion& c : results) {
    passed += c.pass;
    std::cout << "criterion " << c.id << ": " << (c.pass ? "PASS" : "FAIL") << "  "
              << c.detail << " [" << sci(c.seconds) << " s]\n";
  }
  std::cout << "acceptance: " << passed << "/" << results.size()
            << " criteria passed\n";
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
