#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "hessbar/geometry.hpp"
#include "hessbar/rng.hpp"

namespace hessbar {

// Optimum certificate attached to problems built with a known solution.
struct KnownOptimum {
  Vec x_star;
  double f_star = 0.0;
};

// Change of variables between an open box (lower, upper) in R^d and the
// standard-form positive orthant in R^{2d}: original coordinate i maps to the
// pair (x_{2i}, x_{2i+1}) with x_{2i} = z_i - lower_i and
// x_{2i} + x_{2i+1} = upper_i - lower_i.
struct BoxLift {
  Vec lower;
  Vec upper;

  BoxLift(Vec lower_in, Vec upper_in);

  Eigen::Index box_dimension() const { return lower.size(); }
  Eigen::Index lifted_dimension() const { return 2 * lower.size(); }

  Vec lift(const Vec& z) const;    // box point -> lifted point (with slacks)
  Vec unlift(const Vec& x) const;  // lifted point -> box point

  // Pairwise-sum constraint system: one row per box coordinate.
  ConstraintSystem constraints() const;

  // Lifted image of the box center.
  Vec center_start() const;

  // Lifted image of a uniform sample from the open box.
  Vec sample_interior(Rng& rng) const;
};

// Objective + gradient + linear constraints + gradient Lipschitz bound.
// Evaluators are pure; instances are immutable after construction and safe to
// share across threads.
class Problem {
 public:
  using ObjectiveFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;

  Problem(ObjectiveFn f, GradientFn grad, ConstraintSystem constraints, double lipschitz_l);

  double value(const Vec& x) const { return f_(x); }
  Vec gradient(const Vec& x) const { return grad_(x); }

  const ConstraintSystem& constraints() const { return constraints_; }
  double lipschitz() const { return lipschitz_l_; }
  Eigen::Index dimension() const { return constraints_.cols(); }

  const std::optional<KnownOptimum>& known_optimum() const { return known_optimum_; }
  Problem& set_known_optimum(Vec x_star, double f_star);

  // Default strictly feasible start, when the constructor/generator provides one.
  const std::optional<Vec>& default_start() const { return start_; }
  Problem& set_default_start(Vec x0);

  // Present on box-lifted problems; maps iterates back to box coordinates.
  const std::optional<BoxLift>& box_lift() const { return box_lift_; }
  Problem& set_box_lift(BoxLift lift);

 private:
  ObjectiveFn f_;
  GradientFn grad_;
  ConstraintSystem constraints_;
  double lipschitz_l_;
  std::optional<KnownOptimum> known_optimum_;
  std::optional<Vec> start_;
  std::optional<BoxLift> box_lift_;
};

// Largest singular value of a square matrix estimated by power iteration on
// the symmetric part (50 iterations, tolerance 1e-8, deterministic start).
double spectral_norm(const Mat& q);

// f(x) = 1/2 x^T Q x + c^T x. Q must be symmetric (checked to 1e-12 relative).
// lipschitz_l = ||Q||_2 via power iteration; a zero matrix (linear objective)
// falls back to 1.0, which is a valid Lipschitz bound for a constant gradient.
Problem make_quadratic(const Mat& q, const Vec& c, ConstraintSystem constraints);

// General lifting of a smooth objective on an open box to standard form.
// Gradient components on slack coordinates are identically zero.
Problem lift_box(const std::function<double(const Vec&)>& f_box,
                 const std::function<Vec(const Vec&)>& grad_box, Vec lower, Vec upper,
                 double lipschitz_l);

// Rosenbrock banana on [-3,3]^2, lifted. Optimum (1,1), f* = 0.
Problem make_rosenbrock_box();

// Beale three-term benchmark on [-4,4]^2, lifted. Optimum (3, 0.5), f* = 0.
Problem make_beale_box();

// Indefinite QP with exactly `negative_eigs` negative eigenvalues, on a
// bounded feasible region: the first constraint row is all-ones (making the
// region a scaled-simplex slice), the rest are Gaussian. The returned
// problem's default start is the interior point used to build b = A*x.
Problem random_nonconvex_qp(Eigen::Index n, Eigen::Index m, Eigen::Index negative_eigs,
                            std::uint64_t seed);

// Strictly convex QP whose global optimum is a constructed interior point:
// x* > 0 is drawn first, then c := A^T w - Q x* for random w and b := A x*,
// so grad f(x*) lies in the row space of A and x* is the unique minimizer.
// known_optimum is set; the default start is a different interior point on
// the same affine slice.
Problem random_convex_qp(Eigen::Index n, Eigen::Index m, std::uint64_t seed);

}  // namespace hessbar
