#pragma once

#include <cstdint>

#include "hessbar/problems.hpp"

namespace hessbar {

// Classical methods the generic update collapses to under specific metrics:
//   LV  pure-power metric, unconstrained       x+ = x - alpha * x^p .* grad f
//   RD  entropy metric on the unit simplex     multiplicative replicator step
//   AS  pure-power metric, linear objective    affine-scaling step
//   RN  metric = Hessian of (f + beta/2 |.|^2) regularized Newton step
enum class SpecialCase { LV, RD, AS, RN };

struct SpecialCaseInstance {
  SpecialCase which = SpecialCase::LV;
  Problem problem;
  Vec x;              // strictly positive evaluation point
  double alpha = 0.0; // step shared by both update paths
  double power_p = 1.0;   // LV/AS: metric exponent, theta''(t) = t^-p, p in [1,2]
  double newton_beta = 0.0;  // RN: Tikhonov weight
  Vec newton_diag;           // RN: diagonal of the (convex) quadratic's Hessian
};

// One update via the generic metric pipeline and one via the case's
// closed-form textbook formula; returns the max componentwise deviation.
// Throws StructuralMismatch when the instance does not fit the case.
double check_special_case_equivalence(const SpecialCaseInstance& instance);

// Seeded random instance generator for the equivalence harness.
SpecialCaseInstance random_special_case(SpecialCase which, std::uint64_t seed);

}  // namespace hessbar
