#pragma once

#include <optional>
#include <vector>

#include "hessbar/kernels.hpp"

namespace hessbar {

// Linear equality constraints A x = b with A full row rank (m may be 0).
//
// A disjoint block-simplex structure (every row a 0/1 indicator of a coordinate
// block, blocks disjoint) is detected at construction and unlocks closed-form
// dual solves plus O(n) products. Box-lifted problems and traffic assignment
// are exactly this shape.
class ConstraintSystem {
 public:
  ConstraintSystem(Mat a, Vec b);
  static ConstraintSystem unconstrained(Eigen::Index n);

  const Mat& matrix() const { return a_; }
  const Vec& rhs() const { return b_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }

  bool is_block_simplex() const { return static_cast<bool>(blocks_); }
  // Row index -> member coordinates; only available on block-simplex systems.
  const std::vector<std::vector<Eigen::Index>>& blocks() const;

  Vec apply(const Vec& x) const;            // A x
  Vec apply_transpose(const Vec& y) const;  // A^T y
  double feasibility_gap(const Vec& x) const;  // ||A x - b||_inf

  // Per-coordinate upper bound valid on {x >= 0, Ax = b}: from its block total
  // for covered coordinates, and from any strictly positive row otherwise;
  // +inf where nothing applies.
  Vec coordinate_upper_bounds() const;

 private:
  ConstraintSystem() = default;
  void detect_blocks();
  void check_rank() const;

  Mat a_;
  Vec b_;
  std::optional<std::vector<std::vector<Eigen::Index>>> blocks_;
  std::vector<Eigen::Index> column_block_;  // column -> row, -1 when uncovered
};

struct GeometryResult {
  Vec dual_y;         // y solving (A H^-1 A^T) y = A H^-1 grad
  Vec reduced_cost_r; // grad - A^T y
  Vec direction_v;    // -H^-1 r
  double v_norm_x_sq; // v^T H v = r^T H^-1 r
};

// Least-squares multiplier for the metric-weighted projection. Empty for m=0.
Vec dual_variable(const ConstraintSystem& cs, const DiagonalMetric& metric, const Vec& grad);

Vec reduced_cost(const Vec& grad, const ConstraintSystem& cs, const Vec& dual_y);

GeometryResult search_direction(const ConstraintSystem& cs, const DiagonalMetric& metric,
                                const Vec& grad);

// Complementarity residual ||diag(x) r||_inf; vanishes at KKT points.
double kkt_residual(const Vec& x, const GeometryResult& result);

// max(0, -min_i r_i): how far the reduced cost is from dual feasibility r >= 0.
double dual_feasibility_violation(const GeometryResult& result);

}  // namespace hessbar
