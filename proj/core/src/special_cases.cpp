#include "hessbar/special_cases.hpp"

#include <Eigen/LU>
#include <cmath>

#include "hessbar/errors.hpp"
#include "hessbar/solver.hpp"

namespace hessbar {

namespace {

Kernel pure_power_kernel(double p) {
  if (p == 1.0) return make_gibbs(0.0);
  if (p == 2.0) return make_burg(0.0);
  if (p > 1.0 && p < 2.0) return make_tsallis(0.0, p);
  throw StructuralMismatch("special case: metric exponent must lie in [1,2]");
}

Vec generic_update(const Problem& problem, const Vec& x, const DiagonalMetric& metric,
                   double alpha) {
  const GeometryResult geo =
      search_direction(problem.constraints(), metric, problem.gradient(x));
  return x + alpha * geo.direction_v;
}

double max_deviation(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

double check_lv(const SpecialCaseInstance& inst) {
  if (inst.problem.constraints().rows() != 0)
    throw StructuralMismatch("LV case: must be unconstrained");
  const std::vector<Kernel> kernels =
      replicate(pure_power_kernel(inst.power_p), inst.x.size());
  const Vec generic = generic_update(inst.problem, inst.x, metric_at(kernels, inst.x),
                                     inst.alpha);
  const Vec grad = inst.problem.gradient(inst.x);
  Vec closed(inst.x.size());
  for (Eigen::Index i = 0; i < inst.x.size(); ++i)
    closed[i] = inst.x[i] - inst.alpha * std::pow(inst.x[i], inst.power_p) * grad[i];
  return max_deviation(generic, closed);
}

double check_rd(const SpecialCaseInstance& inst) {
  const ConstraintSystem& cs = inst.problem.constraints();
  const bool unit_simplex = cs.rows() == 1 && cs.is_block_simplex() &&
                            cs.blocks()[0].size() == static_cast<std::size_t>(cs.cols()) &&
                            cs.rhs()[0] == 1.0;
  if (!unit_simplex)
    throw StructuralMismatch("RD case: must be the unit simplex");
  const std::vector<Kernel> kernels = replicate(make_gibbs(0.0), inst.x.size());
  const Vec generic = generic_update(inst.problem, inst.x, metric_at(kernels, inst.x),
                                     inst.alpha);
  const Vec grad = inst.problem.gradient(inst.x);
  const double mean_cost = inst.x.dot(grad);  // block average under the entropy metric
  Vec closed(inst.x.size());
  for (Eigen::Index i = 0; i < inst.x.size(); ++i)
    closed[i] = inst.x[i] - inst.alpha * inst.x[i] * (grad[i] - mean_cost);
  return max_deviation(generic, closed);
}

double check_as(const SpecialCaseInstance& inst) {
  const ConstraintSystem& cs = inst.problem.constraints();
  if (cs.rows() == 0) throw StructuralMismatch("AS case: needs equality constraints");
  const Vec grad = inst.problem.gradient(inst.x);
  const Vec probe = (2.0 * inst.x.cwiseAbs().array() + 1.0).matrix();
  if ((grad - inst.problem.gradient(probe)).cwiseAbs().maxCoeff() > 1e-12)
    throw StructuralMismatch("AS case: objective must be linear");

  const std::vector<Kernel> kernels =
      replicate(pure_power_kernel(inst.power_p), inst.x.size());
  const Vec generic = generic_update(inst.problem, inst.x, metric_at(kernels, inst.x),
                                     inst.alpha);

  // Independent dense path: scale by X^p, project the cost, step.
  const Vec scale = inst.x.array().pow(inst.power_p);
  const Mat a = cs.matrix();
  const Mat projected = a * scale.asDiagonal() * a.transpose();
  const Vec y = Eigen::FullPivLU<Mat>(projected).solve(a * scale.cwiseProduct(grad));
  const Vec closed = inst.x - inst.alpha * scale.cwiseProduct(grad - a.transpose() * y);
  return max_deviation(generic, closed);
}

double check_rn(const SpecialCaseInstance& inst) {
  if (inst.problem.constraints().rows() != 0)
    throw StructuralMismatch("RN case: must be unconstrained");
  if (inst.newton_diag.size() != inst.x.size() || !(inst.newton_beta > 0.0))
    throw StructuralMismatch("RN case: needs a diagonal Hessian and positive beta");
  if (!(inst.newton_diag.array() >= 0.0).all())
    throw StructuralMismatch("RN case: objective must be convex");

  // Metric induced by the barrier f + beta/2 |.|^2: constant diagonal D + beta.
  DiagonalMetric metric;
  metric.h_diag = inst.newton_diag.array() + inst.newton_beta;
  metric.h_inv_diag = metric.h_diag.cwiseInverse();
  const Vec generic = generic_update(inst.problem, inst.x, metric, inst.alpha);

  const Vec grad = inst.problem.gradient(inst.x);
  Vec closed(inst.x.size());
  for (Eigen::Index i = 0; i < inst.x.size(); ++i)
    closed[i] = inst.x[i] - inst.alpha * grad[i] / (inst.newton_diag[i] + inst.newton_beta);
  return max_deviation(generic, closed);
}

Mat random_symmetric(Eigen::Index n, Rng& rng) {
  Mat m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = rng.normal();
  return 0.5 * (m + m.transpose());
}

double random_power(Rng& rng) {
  constexpr double kChoices[] = {1.0, 1.3, 1.5, 1.8, 2.0};
  return kChoices[rng.uniform_int(0, 4)];
}

}  // namespace

double check_special_case_equivalence(const SpecialCaseInstance& instance) {
  if (!(instance.x.array() > 0.0).all())
    throw StructuralMismatch("special case: evaluation point must be strictly positive");
  switch (instance.which) {
    case SpecialCase::LV: return check_lv(instance);
    case SpecialCase::RD: return check_rd(instance);
    case SpecialCase::AS: return check_as(instance);
    case SpecialCase::RN: return check_rn(instance);
  }
  throw ConfigError("special case: unknown case");
}

SpecialCaseInstance random_special_case(SpecialCase which, std::uint64_t seed) {
  Rng rng(seed, "special-case");
  const Eigen::Index n = rng.uniform_int(2, 8);

  switch (which) {
    case SpecialCase::LV: {
      Mat q = random_symmetric(n, rng);
      Vec c(n);
      for (Eigen::Index i = 0; i < n; ++i) c[i] = rng.normal();
      SpecialCaseInstance inst{which,
                               make_quadratic(q, c, ConstraintSystem::unconstrained(n)),
                               Vec(n), rng.uniform(0.01, 0.1), random_power(rng), 0.0,
                               Vec()};
      for (Eigen::Index i = 0; i < n; ++i) inst.x[i] = rng.uniform(0.1, 2.0);
      return inst;
    }
    case SpecialCase::RD: {
      Mat q = random_symmetric(n, rng);
      Vec c(n);
      for (Eigen::Index i = 0; i < n; ++i) c[i] = rng.normal();
      Mat a = Mat::Ones(1, n);
      Vec b = Vec::Ones(1);
      SpecialCaseInstance inst{which, make_quadratic(q, c, ConstraintSystem(a, b)), Vec(n),
                               rng.uniform(0.01, 0.1), 1.0, 0.0, Vec()};
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        inst.x[i] = rng.uniform(0.05, 1.0);
        total += inst.x[i];
      }
      inst.x /= total;
      return inst;
    }
    case SpecialCase::AS: {
      const Eigen::Index nn = std::max<Eigen::Index>(n, 4);
      const Eigen::Index m = rng.uniform_int(1, 3);
      Vec c(nn);
      for (Eigen::Index i = 0; i < nn; ++i) c[i] = rng.normal();
      Mat a(m, nn);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < nn; ++j) a(i, j) = rng.normal();
      Vec x(nn);
      for (Eigen::Index i = 0; i < nn; ++i) x[i] = rng.uniform(0.5, 1.5);
      Vec b = a * x;
      SpecialCaseInstance inst{which,
                               make_quadratic(Mat::Zero(nn, nn), c, ConstraintSystem(a, b)),
                               std::move(x), rng.uniform(0.01, 0.1), random_power(rng), 0.0,
                               Vec()};
      return inst;
    }
    case SpecialCase::RN: {
      Vec diag(n), c(n), x(n);
      for (Eigen::Index i = 0; i < n; ++i) diag[i] = rng.uniform(0.1, 2.0);
      for (Eigen::Index i = 0; i < n; ++i) c[i] = rng.normal();
      for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(0.1, 2.0);
      SpecialCaseInstance inst{which,
                               make_quadratic(Mat(diag.asDiagonal()), c,
                                              ConstraintSystem::unconstrained(n)),
                               std::move(x), rng.uniform(0.01, 0.1), 1.0,
                               rng.uniform(0.1, 1.0), std::move(diag)};
      return inst;
    }
  }
  throw ConfigError("special case: unknown case");
}

}  // namespace hessbar
