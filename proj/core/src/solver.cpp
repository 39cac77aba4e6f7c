#include "hessbar/solver.hpp"

#include <algorithm>
#include <cmath>

#include "hessbar/errors.hpp"

namespace hessbar {

namespace {

void validate(const SolverConfig& config, double resolved_l) {
  const ArmijoParams& ap = config.armijo;
  if (!(ap.mu > 0.0 && ap.mu < 1.0)) throw ConfigError("solver: mu must lie in (0,1)");
  if (!(ap.delta > 0.0 && ap.delta < 1.0)) throw ConfigError("solver: delta must lie in (0,1)");
  if (ap.max_backtracks < 1) throw ConfigError("solver: max_backtracks must be >= 1");
  if (!(config.boundary_safety_tau > 0.0 && config.boundary_safety_tau < 1.0))
    throw ConfigError("solver: boundary safety factor must lie in (0,1)");
  if (config.tol_complementarity < 0.0 || config.tol_direction < 0.0)
    throw ConfigError("solver: tolerances must be nonnegative");
  if (config.max_iterations < 1) throw ConfigError("solver: max_iterations must be >= 1");
  if (!(resolved_l > 0.0) || !std::isfinite(resolved_l))
    throw ConfigError("solver: Lipschitz constant must be positive and finite");
}

double feasibility_tolerance(const ConstraintSystem& cs) {
  const double b_norm = cs.rows() == 0 ? 0.0 : cs.rhs().cwiseAbs().maxCoeff();
  return 1e-8 * (1.0 + b_norm);
}

void check_start(const Problem& problem, const Vec& x0) {
  if (x0.size() != problem.dimension())
    throw InfeasibleStart("solver: start has wrong dimension");
  if (!(x0.array() > 0.0).all())
    throw InfeasibleStart("solver: start must be strictly positive");
  if (problem.constraints().feasibility_gap(x0) > feasibility_tolerance(problem.constraints()))
    throw InfeasibleStart("solver: start violates the equality constraints");
  if (!std::isfinite(problem.value(x0)))
    throw InfeasibleStart("solver: objective not finite at the start");
}

void observe_iterate(InvariantDiagnostics& inv, const ConstraintSystem& cs, const Vec& x,
                     const Vec& grad, const GeometryResult& geo) {
  inv.max_feasibility_gap = std::max(inv.max_feasibility_gap, cs.feasibility_gap(x));
  inv.min_coordinate = std::min(inv.min_coordinate, x.minCoeff());
  // The direction is metric steepest descent, so grad.v = -||v||_x^2 exactly.
  const double inner = grad.dot(geo.direction_v);
  const double scale = std::max({1.0, std::abs(inner), geo.v_norm_x_sq});
  inv.max_angle_deviation =
      std::max(inv.max_angle_deviation, std::abs(inner + geo.v_norm_x_sq) / scale);
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ToleranceMet: return "ToleranceMet";
    case Termination::MaxIterations: return "MaxIterations";
    case Termination::StationaryStart: return "StationaryStart";
    case Termination::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

double alpha_zero(const Vec& x, const Vec& reduced_cost_r, std::span<const Kernel> kernels) {
  if (x.size() != reduced_cost_r.size() ||
      static_cast<std::size_t>(x.size()) != kernels.size())
    throw ConfigError("alpha_zero: dimension mismatch");
  double bound = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (reduced_cost_r[i] > 0.0) {
      const double h = kernels[static_cast<std::size_t>(i)].theta_second(x[i]);
      bound = std::min(bound, x[i] * h / reduced_cost_r[i]);
    }
  }
  return bound;
}

double bootstrap_step(double alpha0, double boundary_safety_tau, double kernel_beta,
                      double lipschitz_l) {
  if (!(kernel_beta > 0.0))
    throw ConfigError("bootstrap: kernel curvature floor must be positive "
                      "(declare a finite working range or a positive regularizer)");
  if (!(lipschitz_l > 0.0)) throw ConfigError("bootstrap: Lipschitz constant must be positive");
  if (!(alpha0 > 0.0)) throw ConfigError("bootstrap: boundary step bound must be positive");
  return std::min(boundary_safety_tau * alpha0, 2.0 * kernel_beta / lipschitz_l);
}

ArmijoResult armijo_search(const Problem& problem, const Vec& x, double f_x,
                           const GeometryResult& geo, double alpha_start,
                           const ArmijoParams& params) {
  double alpha = alpha_start;
  for (int l = 0; l <= params.max_backtracks; ++l) {
    Vec x_new = x + alpha * geo.direction_v;
    const double f_new = problem.value(x_new);
    // Written so that a NaN objective fails the test and keeps shrinking.
    if (f_new - f_x <= -params.mu * alpha * geo.v_norm_x_sq)
      return ArmijoResult{alpha, std::move(x_new), f_new, l};
    alpha *= params.delta;
  }
  throw ArmijoExhausted("line search: no sufficient decrease within the backtrack cap");
}

std::vector<Kernel> kernels_for_problem(const Kernel& base, const Problem& problem) {
  const Vec bounds = problem.constraints().coordinate_upper_bounds();
  std::vector<Kernel> kernels;
  kernels.reserve(static_cast<std::size_t>(bounds.size()));
  for (Eigen::Index i = 0; i < bounds.size(); ++i)
    kernels.push_back(base.with_range(
        std::isinf(bounds[i]) ? Kernel::kUnboundedRange : bounds[i]));
  return kernels;
}

SolveReport hba_solve(const Problem& problem, const Vec& x0, std::span<const Kernel> kernels,
                      const SolverConfig& config) {
  const double lipschitz_l =
      config.lipschitz_l > 0.0 ? config.lipschitz_l : problem.lipschitz();
  validate(config, lipschitz_l);
  check_start(problem, x0);
  if (static_cast<Eigen::Index>(kernels.size()) != problem.dimension())
    throw ConfigError("solver: one kernel per coordinate required");

  double beta = std::numeric_limits<double>::infinity();
  for (const Kernel& k : kernels) beta = std::min(beta, k.curvature_floor());

  const ConstraintSystem& cs = problem.constraints();
  const ArmijoParams& ap = config.armijo;
  const double dual_tol = std::sqrt(config.tol_complementarity);

  SolveReport report;
  Vec x = x0;
  double f_x = problem.value(x);
  KktDiagnostics last_kkt;  // most recent diagnostics, kept for the failure path

  auto record_terminal = [&](double comp, double v_norm) {
    report.trace.push_back(IterationRecord{static_cast<std::int64_t>(report.trace.size()),
                                           f_x, 0.0, 0, comp, v_norm});
  };

  try {
    for (std::int64_t k = 0;; ++k) {
      const Vec grad = problem.gradient(x);
      const DiagonalMetric metric = metric_at(kernels, x);
      const GeometryResult geo = search_direction(cs, metric, grad);
      const double comp = kkt_residual(x, geo);
      const double dual_violation = dual_feasibility_violation(geo);
      last_kkt = KktDiagnostics{comp, dual_violation};
      const double v_norm = std::sqrt(geo.v_norm_x_sq);

      observe_iterate(report.invariants, cs, x, grad, geo);
      if (config.record_iterates) report.iterates.push_back(x);

      const bool kkt_met = comp <= config.tol_complementarity && dual_violation <= dual_tol;
      const bool direction_met = v_norm <= config.tol_direction;
      if (kkt_met || direction_met || k >= config.max_iterations) {
        record_terminal(comp, v_norm);
        report.final_kkt = KktDiagnostics{comp, dual_violation};
        report.termination = (kkt_met || direction_met)
                                 ? (k == 0 ? Termination::StationaryStart
                                           : Termination::ToleranceMet)
                                 : Termination::MaxIterations;
        break;
      }

      const double a0 = alpha_zero(x, geo.reduced_cost_r, kernels);
      const double alpha_bar =
          bootstrap_step(a0, config.boundary_safety_tau, beta, lipschitz_l);
      ArmijoResult step = armijo_search(problem, x, f_x, geo, alpha_bar, ap);

      const double armijo_floor = 2.0 * (1.0 - ap.mu) * beta * ap.delta / lipschitz_l;
      const double floor = std::min(armijo_floor, alpha_bar);
      // The floor is a real-arithmetic guarantee: any candidate at the floor
      // scale must pass the sufficient-decrease test. Once the decrease that
      // test demands, mu*floor*||v||_x^2, falls below the rounding resolution
      // of f, accept/reject is quantization noise and the sample measures
      // nothing about the algorithm, so it is skipped.
      const double f_resolution =
          8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f_x));
      if (ap.mu * floor * geo.v_norm_x_sq > f_resolution)
        report.invariants.min_step_floor_slack =
            std::min(report.invariants.min_step_floor_slack, step.alpha - floor);
      report.invariants.max_sufficient_decrease_violation =
          std::max(report.invariants.max_sufficient_decrease_violation,
                   step.f_new - f_x + ap.mu * step.alpha * geo.v_norm_x_sq);

      report.trace.push_back(
          IterationRecord{k, f_x, step.alpha, step.backtracks, comp, v_norm});
      x = std::move(step.x_new);
      f_x = step.f_new;
    }
  } catch (const NumericalError& err) {
    record_terminal(last_kkt.complementarity, 0.0);
    report.final_kkt = last_kkt;
    report.termination = Termination::NumericalFailure;
    report.error_message = err.what();
  }

  report.final_x = std::move(x);
  return report;
}

SolveReport hba_solve(const Problem& problem, const Vec& x0, const Kernel& kernel,
                      const SolverConfig& config) {
  const std::vector<Kernel> kernels = kernels_for_problem(kernel, problem);
  return hba_solve(problem, x0, std::span<const Kernel>(kernels), config);
}

double MdSchedule::at(std::int64_t k) const {
  return inverse_sqrt ? base_step / std::sqrt(static_cast<double>(k + 1)) : base_step;
}

SolveReport mirror_descent_solve(const Problem& problem, const Vec& x0,
                                 const MdSchedule& schedule, const SolverConfig& config) {
  const double lipschitz_l =
      config.lipschitz_l > 0.0 ? config.lipschitz_l : problem.lipschitz();
  validate(config, lipschitz_l);
  if (!(schedule.base_step > 0.0)) throw ConfigError("mirror descent: step must be positive");
  check_start(problem, x0);

  const ConstraintSystem& cs = problem.constraints();
  if (!cs.is_block_simplex())
    throw UnsupportedGeometry("mirror descent: block-simplex constraints required");
  std::vector<char> covered(static_cast<std::size_t>(cs.cols()), 0);
  for (const auto& block : cs.blocks())
    for (Eigen::Index j : block) covered[static_cast<std::size_t>(j)] = 1;
  for (char flag : covered)
    if (!flag)
      throw UnsupportedGeometry("mirror descent: every coordinate must belong to a block");

  // Diagnostics use the entropy metric theta''(t) = 1/t, i.e. h_inv = x.
  const std::vector<Kernel> entropy = replicate(make_gibbs(0.0), problem.dimension());
  const double dual_tol = std::sqrt(config.tol_complementarity);

  SolveReport report;
  Vec x = x0;
  double f_x = problem.value(x);

  try {
    for (std::int64_t k = 0;; ++k) {
      const Vec grad = problem.gradient(x);
      const DiagonalMetric metric = metric_at(entropy, x);
      const GeometryResult geo = search_direction(cs, metric, grad);
      const double comp = kkt_residual(x, geo);
      const double dual_violation = dual_feasibility_violation(geo);
      const double v_norm = std::sqrt(geo.v_norm_x_sq);

      observe_iterate(report.invariants, cs, x, grad, geo);
      if (config.record_iterates) report.iterates.push_back(x);

      const bool kkt_met = comp <= config.tol_complementarity && dual_violation <= dual_tol;
      const bool direction_met = v_norm <= config.tol_direction;
      if (kkt_met || direction_met || k >= config.max_iterations) {
        report.trace.push_back(IterationRecord{k, f_x, 0.0, 0, comp, v_norm});
        report.final_kkt = KktDiagnostics{comp, dual_violation};
        report.termination = (kkt_met || direction_met)
                                 ? (k == 0 ? Termination::StationaryStart
                                           : Termination::ToleranceMet)
                                 : Termination::MaxIterations;
        break;
      }

      const double alpha = schedule.at(k);
      report.trace.push_back(IterationRecord{k, f_x, alpha, 0, comp, v_norm});

      // Multiplicative update, log-domain for stability: within each block,
      // x_i+ = demand * softmax(log x_i - alpha * g_i).
      Vec x_new(x.size());
      for (std::size_t bi = 0; bi < cs.blocks().size(); ++bi) {
        const auto& block = cs.blocks()[bi];
        double max_score = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j : block)
          max_score = std::max(max_score, std::log(x[j]) - alpha * grad[j]);
        double total = 0.0;
        for (Eigen::Index j : block)
          total += std::exp(std::log(x[j]) - alpha * grad[j] - max_score);
        const double demand = cs.rhs()[static_cast<Eigen::Index>(bi)];
        for (Eigen::Index j : block) {
          double value =
              demand * std::exp(std::log(x[j]) - alpha * grad[j] - max_score) / total;
          // exp underflow would break the entropy metric at the next step
          x_new[j] = std::max(value, 1e-300);
        }
      }
      x = std::move(x_new);
      f_x = problem.value(x);
      if (!std::isfinite(f_x))
        throw NumericalError("mirror descent: objective became non-finite");
    }
  } catch (const NumericalError& err) {
    const double comp = report.trace.empty() ? 0.0 : report.trace.back().complementarity_residual;
    report.trace.push_back(IterationRecord{static_cast<std::int64_t>(report.trace.size()),
                                           f_x, 0.0, 0, comp, 0.0});
    report.termination = Termination::NumericalFailure;
    report.error_message = err.what();
  }

  report.final_x = std::move(x);
  return report;
}

}  // namespace hessbar
