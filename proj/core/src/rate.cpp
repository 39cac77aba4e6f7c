#include "hessbar/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hessbar/errors.hpp"

namespace hessbar {

double predicted_rate(const Kernel& kernel) {
  const double omega_bar = std::max(1.0, kernel.steepness_exponent());
  return 1.0 / (2.0 * omega_bar - 1.0);
}

double estimate_f_infinity(std::span<const IterationRecord> trace,
                           const std::optional<KnownOptimum>& known) {
  if (known) return known->f_star;
  if (trace.empty())
    throw InsufficientData("limit estimate: empty trace and no known optimum");
  double best = std::numeric_limits<double>::infinity();
  for (const IterationRecord& rec : trace) best = std::min(best, rec.f_value);
  return best - 1e-12 * (1.0 + std::abs(best));
}

RateFit fit_rate(std::span<const IterationRecord> trace, double f_infinity,
                 double tail_fraction) {
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
    throw ConfigError("rate fit: tail fraction must lie in (0, 1]");
  if (trace.size() < 100)
    throw InsufficientData("rate fit: need at least 100 trace records, got " +
                           std::to_string(trace.size()));

  struct Point {
    std::int64_t k;
    double log_k;
    double log_gap;
  };
  std::vector<Point> usable;
  usable.reserve(trace.size());
  for (const IterationRecord& rec : trace) {
    if (rec.k < 1) continue;  // log k undefined at the start record
    const double gap = rec.f_value - f_infinity;
    if (!(gap > 0.0)) continue;
    usable.push_back({rec.k, std::log(static_cast<double>(rec.k)), std::log(gap + 1e-30)});
  }

  const auto tail_start = static_cast<std::size_t>(
      std::floor((1.0 - tail_fraction) * static_cast<double>(usable.size())));
  const std::size_t tail_points = usable.size() - tail_start;
  if (tail_points < 20)
    throw InsufficientData("rate fit: only " + std::to_string(tail_points) +
                           " positive-gap tail points; need 20");

  double sum_x = 0.0, sum_y = 0.0;
  for (std::size_t i = tail_start; i < usable.size(); ++i) {
    sum_x += usable[i].log_k;
    sum_y += usable[i].log_gap;
  }
  const double n = static_cast<double>(tail_points);
  const double mean_x = sum_x / n, mean_y = sum_y / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = tail_start; i < usable.size(); ++i) {
    const double dx = usable[i].log_k - mean_x;
    const double dy = usable[i].log_gap - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0)
    throw InsufficientData("rate fit: tail covers a single distinct iteration index");

  RateFit fit;
  const double slope = sxy / sxx;
  fit.rho = -slope;
  fit.log_c = mean_y - slope * mean_x;
  // Identical tail values still leave syy at rounding-noise scale, because the
  // mean of n equal doubles is off by an ulp; anything below that scale is a
  // flat tail, fitted exactly by the constant model.
  const double flat_tol = n * std::pow(1e-13 * (1.0 + std::abs(mean_y)), 2);
  if (syy <= flat_tol) {
    fit.r_squared = 1.0;
  } else {
    const double ss_res = syy - slope * sxy;
    fit.r_squared = 1.0 - std::max(0.0, ss_res) / syy;
  }
  fit.window.first_k = usable[tail_start].k;
  fit.window.last_k = usable.back().k;
  fit.window.points = tail_points;
  return fit;
}

RateReport measure_rate(const SolveReport& report, const Kernel& kernel,
                        const std::optional<KnownOptimum>& known) {
  RateReport out;
  out.rho_predicted = predicted_rate(kernel);
  out.f_infinity_estimate = estimate_f_infinity(report.trace, known);
  const RateFit fit = fit_rate(report.trace, out.f_infinity_estimate);
  out.rho_fitted = fit.rho;
  out.fit_window = fit.window;
  out.fit_r_squared = fit.r_squared;
  return out;
}

}  // namespace hessbar
