#pragma once

#include <Eigen/Core>
#include <limits>
#include <span>
#include <vector>

namespace hessbar {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class KernelFamily { Gibbs, Tsallis, Burg, Mixture };

// m/s <= theta''(s) <= upper / s^(2*omega), valid for s in (0, eps_range).
struct SteepnessBounds {
  double lower;  // m
  double upper;  // M
};

// A metric-inducing kernel theta: (0,inf) -> R. theta is strictly convex with
// theta' -> -inf at 0; its second derivative supplies one diagonal entry of the
// position-dependent metric H(x) = diag(theta_i''(x_i)).
//
// Families (reg is the coefficient of an added (reg/2)*t^2 term):
//   Gibbs    theta = reg/2 t^2 + t log t            theta'' = reg + 1/t
//   Tsallis  theta = reg/2 t^2 + t^(2-p)/((1-p)(2-p)), p in (1,2)
//                                                    theta'' = reg + t^-p
//   Burg     theta = reg/2 t^2 - log t               theta'' = reg + 1/t^2
//   Mixture  homotopy between Gibbs (gamma=1/2) and Burg (gamma=1):
//                                                    theta'' = reg + t^(-2*gamma)
//
// Metadata (curvature_floor, growth_floor) is declared over a working range
// (0, range_upper], the interval the coordinates of a bounded feasible region
// actually inhabit; the global infima vanish for unregularized kernels.
class Kernel {
 public:
  static constexpr double kUnboundedRange = std::numeric_limits<double>::infinity();

  double theta(double t) const;
  double theta_prime(double t) const;
  double theta_second(double t) const;

  KernelFamily family() const { return family_; }
  double reg() const { return reg_; }
  double tsallis_p() const { return p_; }
  double mixture_gamma() const { return gamma_; }

  // Lower bound on theta'' over (0, range_upper].
  double curvature_floor() const;
  // Lower bound on t*theta''(t) over (0, range_upper]; controls how fast the
  // inverse metric vanishes toward the boundary.
  double growth_floor() const;
  // Exponent omega of the upper steepness bound.
  double steepness_exponent() const;
  // (m, M) valid on (0, eps_range).
  SteepnessBounds steepness_bounds() const;

  double range_upper() const { return range_upper_; }
  double eps_range() const { return eps_range_; }

  // Same kernel re-declared over a different working range.
  Kernel with_range(double range_upper) const;
  Kernel with_eps_range(double eps_range) const;

 private:
  friend Kernel make_gibbs(double, double);
  friend Kernel make_tsallis(double, double, double);
  friend Kernel make_burg(double, double);
  friend Kernel make_mixture(double, double, double);

  Kernel(KernelFamily family, double reg, double p, double gamma, double range_upper);

  // Exponent q with theta'' = reg + t^-q.
  double barrier_exponent() const;

  KernelFamily family_;
  double reg_;
  double p_ = 0.0;
  double gamma_ = 0.0;
  double range_upper_;
  double eps_range_;
};

Kernel make_gibbs(double reg, double range_upper = 1.0);
Kernel make_tsallis(double reg, double p, double range_upper = 1.0);
Kernel make_burg(double reg, double range_upper = 1.0);
Kernel make_mixture(double reg, double gamma, double range_upper = 1.0);

// One kernel per coordinate.
std::vector<Kernel> replicate(const Kernel& kernel, Eigen::Index n);

struct DiagonalMetric {
  Vec h_diag;      // theta_i''(x_i)
  Vec h_inv_diag;  // 1/theta_i''(x_i); 0 encodes an infinite diagonal entry
};

DiagonalMetric metric_at(std::span<const Kernel> kernels, const Vec& x);
DiagonalMetric metric_at(const Kernel& kernel, const Vec& x);

}  // namespace hessbar
