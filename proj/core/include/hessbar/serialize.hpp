#pragma once

#include <nlohmann/json.hpp>

#include "hessbar/kernels.hpp"
#include "hessbar/problems.hpp"
#include "hessbar/tap.hpp"

namespace hessbar {

// {"type": "gibbs"|"tsallis"|"burg"|"mixture", "beta": float, "p"?: float,
//  "gamma"?: float}. The working range is not part of the config format: it
// is derived from the problem's constraints at solve time.
nlohmann::json kernel_to_json(const Kernel& kernel);
Kernel kernel_from_json(const nlohmann::json& js);

// {"vertices": n, "edges": [{"from","to","a","b"}...],
//  "od_pairs": [{"origin","destination","demand","paths": [[edge ids]...]}...]}
nlohmann::json tap_instance_to_json(const TapInstance& instance);
TapInstance tap_instance_from_json(const nlohmann::json& js);

// {"objective": {"type": "quadratic"|"rosenbrock"|"beale"|"custom_qp", ...},
//  "constraints"?: {"dense": [[row]...], "b": [...]} |
//                  {"sparse": {"shape": [m,n], "triplets": [[i,j,v]...]}, "b": [...]},
//  "L"?: float, "start"?: [floats]}
//   quadratic  explicit dense data: {"q": [[...]], "c": [...]}
//   custom_qp  seeded generator: {"n", "m", "seed", "negative_eigs"?} — zero
//              negative eigenvalues selects the convex known-optimum family
//   rosenbrock/beale  built-in box benchmarks; "constraints" not allowed
// "L" overrides the gradient Lipschitz bound; "start" the default start.
Problem problem_from_json(const nlohmann::json& js);

}  // namespace hessbar
