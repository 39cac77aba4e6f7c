#include "hessbar/problems.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <memory>

#include "hessbar/errors.hpp"

namespace hessbar {

BoxLift::BoxLift(Vec lower_in, Vec upper_in)
    : lower(std::move(lower_in)), upper(std::move(upper_in)) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw ConfigError("box lift: bounds must be nonempty and equally sized");
  if (!((upper - lower).array() > 0.0).all())
    throw ConfigError("box lift: requires lower < upper componentwise");
}

Vec BoxLift::lift(const Vec& z) const {
  if (z.size() != box_dimension()) throw ConfigError("box lift: dimension mismatch");
  Vec x(lifted_dimension());
  for (Eigen::Index i = 0; i < box_dimension(); ++i) {
    x[2 * i] = z[i] - lower[i];
    x[2 * i + 1] = upper[i] - z[i];
  }
  return x;
}

Vec BoxLift::unlift(const Vec& x) const {
  if (x.size() != lifted_dimension()) throw ConfigError("box lift: dimension mismatch");
  Vec z(box_dimension());
  for (Eigen::Index i = 0; i < box_dimension(); ++i) z[i] = x[2 * i] + lower[i];
  return z;
}

ConstraintSystem BoxLift::constraints() const {
  const Eigen::Index d = box_dimension();
  Mat a = Mat::Zero(d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    a(i, 2 * i) = 1.0;
    a(i, 2 * i + 1) = 1.0;
  }
  return ConstraintSystem(std::move(a), upper - lower);
}

Vec BoxLift::center_start() const { return lift((lower + upper) / 2.0); }

Vec BoxLift::sample_interior(Rng& rng) const {
  Vec z(box_dimension());
  for (Eigen::Index i = 0; i < box_dimension(); ++i) {
    double u;
    do {
      u = rng.uniform();
    } while (u <= 0.0);  // keep the sample strictly inside the open box
    z[i] = lower[i] + u * (upper[i] - lower[i]);
  }
  return lift(z);
}

Problem::Problem(ObjectiveFn f, GradientFn grad, ConstraintSystem constraints,
                 double lipschitz_l)
    : f_(std::move(f)),
      grad_(std::move(grad)),
      constraints_(std::move(constraints)),
      lipschitz_l_(lipschitz_l) {
  if (!f_ || !grad_) throw ConfigError("problem: objective and gradient must be callable");
  if (!(lipschitz_l_ > 0.0)) throw ConfigError("problem: Lipschitz constant must be positive");
}

Problem& Problem::set_known_optimum(Vec x_star, double f_star) {
  known_optimum_ = KnownOptimum{std::move(x_star), f_star};
  return *this;
}

Problem& Problem::set_default_start(Vec x0) {
  if (x0.size() != dimension()) throw ConfigError("problem: start dimension mismatch");
  start_ = std::move(x0);
  return *this;
}

Problem& Problem::set_box_lift(BoxLift lift) {
  box_lift_ = std::move(lift);
  return *this;
}

double spectral_norm(const Mat& q) {
  const Eigen::Index n = q.rows();
  if (n == 0) return 0.0;
  const Mat sym = 0.5 * (q + q.transpose());
  Rng rng(0x5bd1e995u, "spectral-norm");  // fixed stream: same matrix, same estimate
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  double vnorm = v.norm();
  if (vnorm == 0.0) return 0.0;
  v /= vnorm;
  double estimate = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    Vec w = sym * v;
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;  // v in the null space; symmetric zero case
    const double next = wnorm;
    v = w / wnorm;
    if (std::abs(next - estimate) <= 1e-8 * std::max(1.0, next)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate;
}

Problem make_quadratic(const Mat& q, const Vec& c, ConstraintSystem constraints) {
  if (q.rows() != q.cols()) throw ConfigError("quadratic: Q must be square");
  if (q.rows() != c.size()) throw ConfigError("quadratic: Q and c sizes differ");
  if (constraints.cols() != q.rows())
    throw ConfigError("quadratic: constraint column count must match Q");
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("quadratic: Q must be symmetric");

  double lipschitz_l = spectral_norm(q);
  if (lipschitz_l == 0.0) lipschitz_l = 1.0;  // constant gradient: any positive bound works

  auto q_shared = std::make_shared<Mat>(q);
  auto c_shared = std::make_shared<Vec>(c);
  return Problem(
      [q_shared, c_shared](const Vec& x) {
        return 0.5 * x.dot(*q_shared * x) + c_shared->dot(x);
      },
      [q_shared, c_shared](const Vec& x) -> Vec { return *q_shared * x + *c_shared; },
      std::move(constraints), lipschitz_l);
}

Problem lift_box(const std::function<double(const Vec&)>& f_box,
                 const std::function<Vec(const Vec&)>& grad_box, Vec lower, Vec upper,
                 double lipschitz_l) {
  BoxLift lift(std::move(lower), std::move(upper));
  const Eigen::Index d = lift.box_dimension();
  auto shift = lift.lower;
  Problem problem(
      [f_box, shift, d](const Vec& x) {
        Vec z(d);
        for (Eigen::Index i = 0; i < d; ++i) z[i] = x[2 * i] + shift[i];
        return f_box(z);
      },
      [grad_box, shift, d](const Vec& x) -> Vec {
        Vec z(d);
        for (Eigen::Index i = 0; i < d; ++i) z[i] = x[2 * i] + shift[i];
        const Vec g = grad_box(z);
        Vec lifted = Vec::Zero(2 * d);
        for (Eigen::Index i = 0; i < d; ++i) lifted[2 * i] = g[i];
        return lifted;
      },
      lift.constraints(), lipschitz_l);
  problem.set_default_start(lift.center_start());
  problem.set_box_lift(std::move(lift));
  return problem;
}

namespace {

double rosenbrock_value(const Vec& z) {
  const double t = z[1] - z[0] * z[0];
  const double u = 1.0 - z[0];
  return 100.0 * t * t + u * u;
}

Vec rosenbrock_gradient(const Vec& z) {
  const double t = z[1] - z[0] * z[0];
  Vec g(2);
  g[0] = -400.0 * z[0] * t - 2.0 * (1.0 - z[0]);
  g[1] = 200.0 * t;
  return g;
}

double beale_value(const Vec& z) {
  const double t1 = 1.5 - z[0] + z[0] * z[1];
  const double t2 = 2.25 - z[0] + z[0] * z[1] * z[1];
  const double t3 = 2.625 - z[0] + z[0] * z[1] * z[1] * z[1];
  return t1 * t1 + t2 * t2 + t3 * t3;
}

Vec beale_gradient(const Vec& z) {
  const double y = z[1];
  const double t1 = 1.5 - z[0] + z[0] * y;
  const double t2 = 2.25 - z[0] + z[0] * y * y;
  const double t3 = 2.625 - z[0] + z[0] * y * y * y;
  Vec g(2);
  g[0] = 2.0 * t1 * (y - 1.0) + 2.0 * t2 * (y * y - 1.0) + 2.0 * t3 * (y * y * y - 1.0);
  g[1] = 2.0 * t1 * z[0] + 4.0 * t2 * z[0] * y + 6.0 * t3 * z[0] * y * y;
  return g;
}

// Gradient Lipschitz bounds: max Hessian spectral norm sampled on a 100x100
// grid over the box, times a 1.1 safety margin. Precomputed; the value only
// sets the bootstrap step scale and backtracking absorbs any misestimate.
constexpr double kRosenbrockLipschitz = 13335.054952292474;
constexpr double kBealeLipschitz = 161553.65348160247;

}  // namespace

Problem make_rosenbrock_box() {
  Problem problem = lift_box(rosenbrock_value, rosenbrock_gradient, Vec::Constant(2, -3.0),
                             Vec::Constant(2, 3.0), kRosenbrockLipschitz);
  problem.set_known_optimum(problem.box_lift()->lift(Vec::Ones(2)), 0.0);
  return problem;
}

Problem make_beale_box() {
  Problem problem = lift_box(beale_value, beale_gradient, Vec::Constant(2, -4.0),
                             Vec::Constant(2, 4.0), kBealeLipschitz);
  Vec z_star(2);
  z_star << 3.0, 0.5;
  problem.set_known_optimum(problem.box_lift()->lift(z_star), 0.0);
  return problem;
}

namespace {

// Orthogonal matrix from the QR factorization of a Gaussian draw, with the
// sign convention diag(R) > 0 so the result is canonical.
Mat random_orthogonal(Eigen::Index n, Rng& rng) {
  Mat gauss(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) gauss(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(gauss);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Mat random_constraint_matrix(Eigen::Index n, Eigen::Index m, Rng& rng) {
  Mat a(m, n);
  a.row(0).setOnes();  // bounds the feasible region: sum(x) is fixed
  for (Eigen::Index i = 1; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a;
}

}  // namespace

Problem random_nonconvex_qp(Eigen::Index n, Eigen::Index m, Eigen::Index negative_eigs,
                            std::uint64_t seed) {
  if (negative_eigs < 1 || negative_eigs > n)
    throw ConfigError("nonconvex qp: need between 1 and n negative eigenvalues");
  if (m < 1 || m >= n) throw ConfigError("nonconvex qp: need 1 <= m < n");

  Rng rng(seed, "nonconvex-qp");
  const Mat v = random_orthogonal(n, rng);
  Vec lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double magnitude = rng.uniform(0.5, 2.0);
    lambda[i] = (i < negative_eigs) ? -magnitude : magnitude;
  }
  const Mat q = v.transpose() * lambda.asDiagonal() * v;

  Vec c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = rng.normal();

  const Mat a = random_constraint_matrix(n, m, rng);
  Vec x_interior(n);
  for (Eigen::Index i = 0; i < n; ++i) x_interior[i] = rng.uniform(0.5, 1.5);
  Vec b = a * x_interior;

  Problem problem = make_quadratic(q, c, ConstraintSystem(a, std::move(b)));
  problem.set_default_start(std::move(x_interior));
  return problem;
}

Problem random_convex_qp(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  if (m < 1 || m >= n) throw ConfigError("convex qp: need 1 <= m < n");

  Rng rng(seed, "convex-qp");
  const Mat v = random_orthogonal(n, rng);
  Vec lambda(n);
  for (Eigen::Index i = 0; i < n; ++i) lambda[i] = rng.uniform(0.5, 2.0);
  const Mat q = v.transpose() * lambda.asDiagonal() * v;

  const Mat a = random_constraint_matrix(n, m, rng);
  Vec x_star(n);
  for (Eigen::Index i = 0; i < n; ++i) x_star[i] = rng.uniform(0.5, 1.5);
  Vec w(m);
  for (Eigen::Index i = 0; i < m; ++i) w[i] = rng.normal();

  // grad f(x*) = Q x* + c = A^T w, so x* satisfies the first-order conditions;
  // strict convexity and interiority make it the unique global minimizer.
  const Vec c = a.transpose() * w - q * x_star;
  const Vec b = a * x_star;
  const double f_star = 0.5 * x_star.dot(q * x_star) + c.dot(x_star);

  Problem problem = make_quadratic(q, c, ConstraintSystem(a, b));
  problem.set_known_optimum(x_star, f_star);

  // Start elsewhere on the same affine slice: step along a projected random
  // direction, scaled to keep every coordinate strictly positive.
  Vec direction(n);
  for (Eigen::Index i = 0; i < n; ++i) direction[i] = rng.normal();
  const Mat aat = a * a.transpose();
  direction -= a.transpose() * aat.ldlt().solve(a * direction);
  double max_scale = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    if (direction[i] < 0.0) max_scale = std::min(max_scale, x_star[i] / -direction[i]);
  Vec start = x_star;
  if (direction.norm() > 1e-12) {
    const double scale = std::isinf(max_scale) ? 1.0 : 0.5 * max_scale;
    start += scale * direction;
  }
  problem.set_default_start(std::move(start));
  return problem;
}

}  // namespace hessbar
