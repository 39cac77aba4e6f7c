#include "hessbar/kernels.hpp"

#include <cmath>

#include "hessbar/errors.hpp"

namespace hessbar {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Kernel::Kernel(KernelFamily family, double reg, double p, double gamma, double range_upper)
    : family_(family), reg_(reg), p_(p), gamma_(gamma), range_upper_(range_upper) {
  if (reg < 0.0) throw ConfigError("kernel: reg must be nonnegative");
  if (!(range_upper > 0.0)) throw ConfigError("kernel: range_upper must be positive");
  eps_range_ = std::min(1.0, range_upper) / 2.0;
}

double Kernel::barrier_exponent() const {
  switch (family_) {
    case KernelFamily::Gibbs:
      return 1.0;
    case KernelFamily::Tsallis:
      return p_;
    case KernelFamily::Burg:
      return 2.0;
    case KernelFamily::Mixture:
      return 2.0 * gamma_;
  }
  return 1.0;
}

double Kernel::theta(double t) const {
  const double quad = 0.5 * reg_ * t * t;
  switch (family_) {
    case KernelFamily::Gibbs:
      return quad + t * std::log(t);
    case KernelFamily::Tsallis:
      return quad + std::pow(t, 2.0 - p_) / ((1.0 - p_) * (2.0 - p_));
    case KernelFamily::Burg:
      return quad - std::log(t);
    case KernelFamily::Mixture:
      if (gamma_ == 0.5) return quad + t * std::log(t) - t;
      if (gamma_ == 1.0) return quad - std::log(t);
      return quad + std::pow(t, 2.0 * (1.0 - gamma_)) /
                        (2.0 * (1.0 - gamma_) * (1.0 - 2.0 * gamma_));
  }
  return quad;
}

double Kernel::theta_prime(double t) const {
  const double lin = reg_ * t;
  switch (family_) {
    case KernelFamily::Gibbs:
      return lin + std::log(t) + 1.0;
    case KernelFamily::Tsallis:
      return lin + std::pow(t, 1.0 - p_) / (1.0 - p_);
    case KernelFamily::Burg:
      return lin - 1.0 / t;
    case KernelFamily::Mixture:
      if (gamma_ == 0.5) return lin + std::log(t);
      if (gamma_ == 1.0) return lin - 1.0 / t;
      return lin + std::pow(t, 1.0 - 2.0 * gamma_) / (1.0 - 2.0 * gamma_);
  }
  return lin;
}

double Kernel::theta_second(double t) const {
  return reg_ + std::pow(t, -barrier_exponent());
}

double Kernel::curvature_floor() const {
  // theta'' = reg + t^-q is decreasing, so the infimum over (0, range_upper]
  // sits at the range end; over an unbounded range only reg survives.
  if (range_upper_ == kUnboundedRange) return reg_;
  return reg_ + std::pow(range_upper_, -barrier_exponent());
}

double Kernel::growth_floor() const {
  const double q = barrier_exponent();
  // t*theta'' = reg*t + t^(1-q); for q = 1 that is reg*t + 1 >= 1 everywhere.
  if (q == 1.0) return 1.0;
  if (range_upper_ != kUnboundedRange) return std::pow(range_upper_, 1.0 - q);
  if (reg_ <= 0.0) return 0.0;
  // Interior minimum of reg*t + t^(1-q) at t* = ((q-1)/reg)^(1/q).
  const double t_star = std::pow((q - 1.0) / reg_, 1.0 / q);
  return reg_ * t_star + std::pow(t_star, 1.0 - q);
}

double Kernel::steepness_exponent() const {
  switch (family_) {
    case KernelFamily::Gibbs:
      return 0.5;
    case KernelFamily::Tsallis:
    case KernelFamily::Burg:
      return 1.0;
    case KernelFamily::Mixture:
      return gamma_;
  }
  return 1.0;
}

SteepnessBounds Kernel::steepness_bounds() const {
  const double q = barrier_exponent();
  const double w = steepness_exponent();
  // Lower: m <= s*theta''(s) = reg*s + s^(1-q) on (0, eps_range); s^(1-q) is
  // nonincreasing for q >= 1, so its value at eps_range is a valid floor.
  const double m = std::pow(eps_range_, 1.0 - q);
  // Upper: s^(2w)*theta''(s) = reg*s^(2w) + s^(2w-q) with 2w >= q, both terms
  // nondecreasing; the supremum over (0, eps_range) is attained at eps_range.
  const double big_m = reg_ * std::pow(eps_range_, 2.0 * w) + std::pow(eps_range_, 2.0 * w - q);
  return SteepnessBounds{m, big_m};
}

Kernel Kernel::with_range(double range_upper) const {
  Kernel k = *this;
  if (!(range_upper > 0.0)) throw ConfigError("kernel: range_upper must be positive");
  k.range_upper_ = range_upper;
  k.eps_range_ = std::min(1.0, range_upper) / 2.0;
  return k;
}

Kernel Kernel::with_eps_range(double eps_range) const {
  Kernel k = *this;
  if (!(eps_range > 0.0)) throw ConfigError("kernel: eps_range must be positive");
  k.eps_range_ = eps_range;
  return k;
}

Kernel make_gibbs(double reg, double range_upper) {
  return Kernel(KernelFamily::Gibbs, reg, 0.0, 0.0, range_upper);
}

Kernel make_tsallis(double reg, double p, double range_upper) {
  if (!(p > 1.0 && p < 2.0)) throw ConfigError("tsallis kernel: p must lie in (1,2)");
  return Kernel(KernelFamily::Tsallis, reg, p, 0.0, range_upper);
}

Kernel make_burg(double reg, double range_upper) {
  return Kernel(KernelFamily::Burg, reg, 0.0, 0.0, range_upper);
}

Kernel make_mixture(double reg, double gamma, double range_upper) {
  if (!(gamma >= 0.5 && gamma <= 1.0))
    throw ConfigError("mixture kernel: gamma must lie in [1/2, 1]");
  return Kernel(KernelFamily::Mixture, reg, 0.0, gamma, range_upper);
}

std::vector<Kernel> replicate(const Kernel& kernel, Eigen::Index n) {
  if (n <= 0) throw ConfigError("replicate: n must be positive");
  return std::vector<Kernel>(static_cast<std::size_t>(n), kernel);
}

DiagonalMetric metric_at(std::span<const Kernel> kernels, const Vec& x) {
  if (static_cast<Eigen::Index>(kernels.size()) != x.size())
    throw ConfigError("metric_at: kernel count does not match dimension");
  DiagonalMetric metric;
  metric.h_diag.resize(x.size());
  metric.h_inv_diag.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw ConfigError("metric_at: point must be strictly positive");
    const double h = kernels[static_cast<std::size_t>(i)].theta_second(x[i]);
    metric.h_diag[i] = h;
    metric.h_inv_diag[i] = std::isinf(h) ? 0.0 : 1.0 / h;
  }
  return metric;
}

DiagonalMetric metric_at(const Kernel& kernel, const Vec& x) {
  std::vector<Kernel> ks = replicate(kernel, x.size());
  return metric_at(std::span<const Kernel>(ks), x);
}

}  // namespace hessbar
