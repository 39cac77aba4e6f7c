#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hessbar/kernels.hpp"
#include "hessbar/problems.hpp"

namespace hessbar {

// Backtracking line-search parameters: accept the first step delta^l * alpha
// whose decrease beats mu * alpha * ||v||_x^2.
struct ArmijoParams {
  double mu = 1e-4;        // sufficient decrease factor, in (0,1)
  double delta = 0.5;      // shrink factor, in (0,1)
  int max_backtracks = 60; // safety cap on l
};

struct SolverConfig {
  ArmijoParams armijo;
  // Gradient Lipschitz bound; <= 0 means "use the problem's own value".
  double lipschitz_l = 0.0;
  // Strict-interiority safety factor applied to the boundary step bound: the
  // raw bound exactly zeroes a coordinate, so the step is shrunk by this
  // factor to stay inside the orthant.
  double boundary_safety_tau = 0.99;
  double tol_complementarity = 1e-8;
  double tol_direction = 1e-12;
  std::int64_t max_iterations = 1000000;
  // Record every iterate vector in the report (used for trajectory plots).
  bool record_iterates = false;
};

struct IterationRecord {
  std::int64_t k = 0;
  double f_value = 0.0;
  double step_alpha = 0.0;  // 0 on the terminal record
  int backtracks = 0;
  double complementarity_residual = 0.0;
  double v_norm_x = 0.0;
};

enum class Termination { ToleranceMet, MaxIterations, StationaryStart, NumericalFailure };

std::string to_string(Termination t);

struct KktDiagnostics {
  double complementarity = 0.0;
  double dual_feasibility_violation = 0.0;
};

// Worst-case observations across a whole run; the invariant suite asserts on
// these instead of re-walking the trace.
struct InvariantDiagnostics {
  // max over steps of f_new - f + mu*alpha*||v||_x^2 (must be <= 0)
  double max_sufficient_decrease_violation = -std::numeric_limits<double>::infinity();
  // max over iterates of ||A x - b||_inf
  double max_feasibility_gap = 0.0;
  // min over iterates of min_i x_i (must stay > 0)
  double min_coordinate = std::numeric_limits<double>::infinity();
  // max relative deviation of grad.v from -||v||_x^2
  double max_angle_deviation = 0.0;
  // min over steps of alpha - floor, floor = min(2(1-mu)*beta*delta/L, alpha_bar)
  double min_step_floor_slack = std::numeric_limits<double>::infinity();
};

struct SolveReport {
  Vec final_x;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::MaxIterations;
  KktDiagnostics final_kkt;
  InvariantDiagnostics invariants;
  std::vector<Vec> iterates;  // filled only when config.record_iterates
  std::string error_message;  // nonempty only on NumericalFailure

  std::int64_t iterations() const {
    return trace.empty() ? 0 : static_cast<std::int64_t>(trace.size()) - 1;
  }
  double final_f() const { return trace.empty() ? 0.0 : trace.back().f_value; }
};

// Largest step that keeps x + alpha*v in the positive orthant, expressed via
// the metric: min over {i : r_i > 0} of x_i * theta''_i(x_i) / r_i, or +inf
// when no component of the reduced cost is positive.
double alpha_zero(const Vec& x, const Vec& reduced_cost_r, std::span<const Kernel> kernels);

// Starting step for the backtracking search: min(tau * alpha0, 2*beta/L).
double bootstrap_step(double alpha0, double boundary_safety_tau, double kernel_beta,
                      double lipschitz_l);

struct ArmijoResult {
  double alpha = 0.0;
  Vec x_new;
  double f_new = 0.0;
  int backtracks = 0;
};

// First l >= 0 with f(x + delta^l*alpha_start*v) - f(x) <= -mu*delta^l*alpha_start*||v||_x^2.
// Throws ArmijoExhausted past params.max_backtracks.
ArmijoResult armijo_search(const Problem& problem, const Vec& x, double f_x,
                           const GeometryResult& geo, double alpha_start,
                           const ArmijoParams& params);

// Clone a base kernel per coordinate, with each working range taken from the
// constraint system's coordinate upper bounds (so declared curvature floors
// genuinely bound the metric over the reachable set).
std::vector<Kernel> kernels_for_problem(const Kernel& base, const Problem& problem);

// Forward-Euler discretization of the metric gradient flow with backtracking.
SolveReport hba_solve(const Problem& problem, const Vec& x0, std::span<const Kernel> kernels,
                      const SolverConfig& config);
SolveReport hba_solve(const Problem& problem, const Vec& x0, const Kernel& kernel,
                      const SolverConfig& config);

// Step-size schedule for the mirror-descent baseline.
struct MdSchedule {
  double base_step = 0.1;
  bool inverse_sqrt = false;  // true: base/sqrt(k+1); false: constant

  double at(std::int64_t k) const;
};

// Entropic mirror descent with the closed-form multiplicative update,
// renormalized per block to its demand. Requires block-simplex constraints
// covering every coordinate. Trace and diagnostics recorded exactly like the
// main solver (using the entropy metric), but f is not guaranteed monotone.
SolveReport mirror_descent_solve(const Problem& problem, const Vec& x0,
                                 const MdSchedule& schedule, const SolverConfig& config);

}  // namespace hessbar
