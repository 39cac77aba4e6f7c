#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "hessbar/kernels.hpp"
#include "hessbar/problems.hpp"
#include "hessbar/solver.hpp"

namespace hessbar {

// Tail window the power law was fitted on.
struct FitWindow {
  std::int64_t first_k = 0;
  std::int64_t last_k = 0;
  std::size_t points = 0;
};

// Least-squares fit of log(gap) against log(k) over the trace tail:
// gap(k) ~ C * k^(-rho), rho = -slope.
struct RateFit {
  double rho = 0.0;
  double log_c = 0.0;  // intercept: log C
  double r_squared = 0.0;
  FitWindow window;
};

// Decay exponent the steepness class guarantees for the running optimality
// gap: 1 / (2*max(1, omega) - 1), where omega is the kernel's steepness
// exponent. Flat-enough kernels (omega <= 1) all sit at the 1/k boundary.
double predicted_rate(const Kernel& kernel);

// Limiting objective value the gaps are measured against. A known optimum is
// authoritative; otherwise the trace's best value stands in, nudged down by a
// relative epsilon so the final gap stays positive on a log scale.
double estimate_f_infinity(std::span<const IterationRecord> trace,
                           const std::optional<KnownOptimum>& known);

// Fit over the last `tail_fraction` of the positive-gap records with k >= 1
// (default: last half, excluding the transient). Requires a trace of at least
// 100 records and at least 20 usable tail points; throws InsufficientData
// otherwise. Faster-than-polynomial decay yields window-dependent diagnostics,
// not an error: the fitted exponent grows with a later window.
RateFit fit_rate(std::span<const IterationRecord> trace, double f_infinity,
                 double tail_fraction = 0.5);

struct RateReport {
  double rho_predicted = 0.0;
  double rho_fitted = 0.0;
  double f_infinity_estimate = 0.0;
  FitWindow fit_window;
  double fit_r_squared = 0.0;
};

// Predicted-versus-fitted summary for one solve under one kernel.
RateReport measure_rate(const SolveReport& report, const Kernel& kernel,
                        const std::optional<KnownOptimum>& known);

}  // namespace hessbar
