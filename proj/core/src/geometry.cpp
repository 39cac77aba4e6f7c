#include "hessbar/geometry.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "hessbar/errors.hpp"

namespace hessbar {

namespace {
constexpr double kRankTolerance = 1e-10;
}

ConstraintSystem::ConstraintSystem(Mat a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size())
    throw ConfigError("constraints: A and b row counts differ");
  detect_blocks();
  if (!blocks_) check_rank();  // disjoint indicator rows are orthogonal, rank is free
}

ConstraintSystem ConstraintSystem::unconstrained(Eigen::Index n) {
  ConstraintSystem cs;
  cs.a_ = Mat(0, n);
  cs.b_ = Vec(0);
  cs.column_block_.assign(static_cast<std::size_t>(n), -1);
  return cs;
}

void ConstraintSystem::detect_blocks() {
  const Eigen::Index m = a_.rows(), n = a_.cols();
  column_block_.assign(static_cast<std::size_t>(n), -1);
  if (m == 0) return;
  std::vector<std::vector<Eigen::Index>> blocks(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = a_(i, j);
      if (v == 0.0) continue;
      if (v != 1.0) return;  // not an indicator row
      if (column_block_[static_cast<std::size_t>(j)] != -1) {
        // overlapping blocks
        column_block_.assign(static_cast<std::size_t>(n), -1);
        return;
      }
      column_block_[static_cast<std::size_t>(j)] = i;
      blocks[static_cast<std::size_t>(i)].push_back(j);
    }
    if (blocks[static_cast<std::size_t>(i)].empty()) {
      column_block_.assign(static_cast<std::size_t>(n), -1);
      return;  // an all-zero row can never be part of a full-rank system
    }
  }
  blocks_ = std::move(blocks);
}

void ConstraintSystem::check_rank() const {
  const Eigen::Index m = a_.rows();
  if (m == 0) return;
  Eigen::JacobiSVD<Mat> svd(a_);
  const Vec& sv = svd.singularValues();
  const double cutoff = kRankTolerance * sv[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  if (rank < m)
    throw RankDeficientConstraints("constraints: A does not have full row rank");
}

const std::vector<std::vector<Eigen::Index>>& ConstraintSystem::blocks() const {
  if (!blocks_) throw UnsupportedGeometry("constraints: not block-simplex");
  return *blocks_;
}

Vec ConstraintSystem::apply(const Vec& x) const {
  if (x.size() != cols()) throw ConfigError("constraints: dimension mismatch in A*x");
  if (blocks_) {
    Vec out(rows());
    for (Eigen::Index i = 0; i < rows(); ++i) {
      double s = 0.0;
      for (Eigen::Index j : (*blocks_)[static_cast<std::size_t>(i)]) s += x[j];
      out[i] = s;
    }
    return out;
  }
  return a_ * x;
}

Vec ConstraintSystem::apply_transpose(const Vec& y) const {
  if (y.size() != rows()) throw ConfigError("constraints: dimension mismatch in A^T*y");
  if (blocks_) {
    Vec out = Vec::Zero(cols());
    for (Eigen::Index i = 0; i < rows(); ++i)
      for (Eigen::Index j : (*blocks_)[static_cast<std::size_t>(i)]) out[j] = y[i];
    return out;
  }
  return a_.transpose() * y;
}

double ConstraintSystem::feasibility_gap(const Vec& x) const {
  if (rows() == 0) return 0.0;
  return (apply(x) - b_).cwiseAbs().maxCoeff();
}

Vec ConstraintSystem::coordinate_upper_bounds() const {
  const double inf = std::numeric_limits<double>::infinity();
  Vec bounds = Vec::Constant(cols(), inf);
  if (blocks_) {
    for (Eigen::Index i = 0; i < rows(); ++i)
      for (Eigen::Index j : (*blocks_)[static_cast<std::size_t>(i)])
        bounds[j] = std::min(bounds[j], b_[i]);
    return bounds;
  }
  for (Eigen::Index i = 0; i < rows(); ++i) {
    if ((a_.row(i).array() > 0.0).all()) {
      for (Eigen::Index j = 0; j < cols(); ++j)
        bounds[j] = std::min(bounds[j], b_[i] / a_(i, j));
    }
  }
  return bounds;
}

Vec dual_variable(const ConstraintSystem& cs, const DiagonalMetric& metric, const Vec& grad) {
  const Eigen::Index m = cs.rows();
  if (m == 0) return Vec(0);
  if (grad.size() != cs.cols() || metric.h_inv_diag.size() != cs.cols())
    throw ConfigError("dual_variable: dimension mismatch");

  if (cs.is_block_simplex()) {
    // A H^-1 A^T is diagonal with block sums of h_inv; the solve is elementwise.
    Vec y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index j : cs.blocks()[static_cast<std::size_t>(i)]) {
        num += metric.h_inv_diag[j] * grad[j];
        den += metric.h_inv_diag[j];
      }
      if (!(den > 0.0))
        throw SingularMetricSystem("dual_variable: degenerate block metric");
      y[i] = num / den;
    }
    return y;
  }

  const Mat weighted = cs.matrix() * metric.h_inv_diag.asDiagonal();  // A H^-1
  Mat normal = weighted * cs.matrix().transpose();
  const Vec rhs = weighted * grad;

  Eigen::LLT<Mat> llt(normal);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * normal.trace() / static_cast<double>(m);
    normal.diagonal().array() += jitter;
    llt.compute(normal);
    if (llt.info() != Eigen::Success)
      throw SingularMetricSystem("dual_variable: A*H^-1*A^T not positive definite");
  }
  return llt.solve(rhs);
}

Vec reduced_cost(const Vec& grad, const ConstraintSystem& cs, const Vec& dual_y) {
  if (cs.rows() == 0) return grad;
  return grad - cs.apply_transpose(dual_y);
}

GeometryResult search_direction(const ConstraintSystem& cs, const DiagonalMetric& metric,
                                const Vec& grad) {
  GeometryResult result;
  result.dual_y = dual_variable(cs, metric, grad);
  result.reduced_cost_r = reduced_cost(grad, cs, result.dual_y);
  result.direction_v = -(metric.h_inv_diag.array() * result.reduced_cost_r.array()).matrix();
  result.v_norm_x_sq =
      (result.reduced_cost_r.array().square() * metric.h_inv_diag.array()).sum();
  return result;
}

double kkt_residual(const Vec& x, const GeometryResult& result) {
  if (x.size() != result.reduced_cost_r.size())
    throw ConfigError("kkt_residual: dimension mismatch");
  return (x.array() * result.reduced_cost_r.array()).abs().maxCoeff();
}

double dual_feasibility_violation(const GeometryResult& result) {
  if (result.reduced_cost_r.size() == 0) return 0.0;
  return std::max(0.0, -result.reduced_cost_r.minCoeff());
}

}  // namespace hessbar
