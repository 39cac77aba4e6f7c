#include "hessbar/serialize.hpp"

#include <string>
#include <utility>
#include <vector>

#include "hessbar/errors.hpp"

namespace hessbar {

namespace {

using nlohmann::json;

double require_number(const json& js, const char* key, const char* where) {
  if (!js.contains(key) || !js.at(key).is_number())
    throw ConfigError(std::string(where) + ": missing numeric field '" + key + "'");
  return js.at(key).get<double>();
}

double optional_number(const json& js, const char* key, double fallback) {
  if (!js.contains(key)) return fallback;
  if (!js.at(key).is_number())
    throw ConfigError(std::string("field '") + key + "' must be a number");
  return js.at(key).get<double>();
}

Eigen::Index require_index(const json& js, const char* key, const char* where) {
  if (!js.contains(key) || !js.at(key).is_number_integer())
    throw ConfigError(std::string(where) + ": missing integer field '" + key + "'");
  return js.at(key).get<Eigen::Index>();
}

Vec vec_from_json(const json& js, const char* where) {
  if (!js.is_array()) throw ConfigError(std::string(where) + ": expected an array");
  Vec v(static_cast<Eigen::Index>(js.size()));
  Eigen::Index i = 0;
  for (const auto& entry : js) {
    if (!entry.is_number())
      throw ConfigError(std::string(where) + ": non-numeric entry");
    v[i++] = entry.get<double>();
  }
  return v;
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

json kernel_to_json(const Kernel& kernel) {
  json js;
  js["beta"] = kernel.reg();
  switch (kernel.family()) {
    case KernelFamily::Gibbs:
      js["type"] = "gibbs";
      break;
    case KernelFamily::Tsallis:
      js["type"] = "tsallis";
      js["p"] = kernel.tsallis_p();
      break;
    case KernelFamily::Burg:
      js["type"] = "burg";
      break;
    case KernelFamily::Mixture:
      js["type"] = "mixture";
      js["gamma"] = kernel.mixture_gamma();
      break;
  }
  return js;
}

Kernel kernel_from_json(const json& js) {
  if (!js.is_object() || !js.contains("type") || !js.at("type").is_string())
    throw ConfigError("kernel config: missing 'type'");
  const auto type = js.at("type").get<std::string>();
  const double beta = optional_number(js, "beta", 0.0);
  if (type == "gibbs") return make_gibbs(beta);
  if (type == "tsallis") return make_tsallis(beta, require_number(js, "p", "kernel config"));
  if (type == "burg") return make_burg(beta);
  if (type == "mixture")
    return make_mixture(beta, require_number(js, "gamma", "kernel config"));
  throw ConfigError("kernel config: unknown type '" + type + "'");
}

json tap_instance_to_json(const TapInstance& instance) {
  json js;
  js["vertices"] = instance.num_vertices();
  json edges = json::array();
  for (const DirectedEdge& e : instance.edges()) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"a", e.cost_a}, {"b", e.cost_b}});
  }
  js["edges"] = std::move(edges);
  json pairs = json::array();
  for (std::size_t i = 0; i < instance.od_pairs().size(); ++i) {
    const OdPair& od = instance.od_pairs()[i];
    json paths = json::array();
    for (const EdgePath& path : instance.paths()[i]) {
      json ids = json::array();
      for (Eigen::Index e : path) ids.push_back(e);
      paths.push_back(std::move(ids));
    }
    pairs.push_back({{"origin", od.origin},
                     {"destination", od.destination},
                     {"demand", od.demand},
                     {"paths", std::move(paths)}});
  }
  js["od_pairs"] = std::move(pairs);
  return js;
}

TapInstance tap_instance_from_json(const json& js) {
  if (!js.is_object()) throw ConfigError("routing instance json: expected an object");
  const Eigen::Index vertices = require_index(js, "vertices", "routing instance json");
  if (!js.contains("edges") || !js.at("edges").is_array())
    throw ConfigError("routing instance json: missing 'edges' array");
  std::vector<DirectedEdge> edges;
  edges.reserve(js.at("edges").size());
  for (const auto& ej : js.at("edges")) {
    DirectedEdge e;
    e.from = require_index(ej, "from", "routing instance json edge");
    e.to = require_index(ej, "to", "routing instance json edge");
    e.cost_a = require_number(ej, "a", "routing instance json edge");
    e.cost_b = require_number(ej, "b", "routing instance json edge");
    edges.push_back(e);
  }
  if (!js.contains("od_pairs") || !js.at("od_pairs").is_array())
    throw ConfigError("routing instance json: missing 'od_pairs' array");
  std::vector<OdPair> od_pairs;
  std::vector<std::vector<EdgePath>> paths;
  for (const auto& pj : js.at("od_pairs")) {
    OdPair od;
    od.origin = require_index(pj, "origin", "routing instance json pair");
    od.destination = require_index(pj, "destination", "routing instance json pair");
    od.demand = require_number(pj, "demand", "routing instance json pair");
    if (!pj.contains("paths") || !pj.at("paths").is_array())
      throw ConfigError("routing instance json: pair without 'paths'");
    std::vector<EdgePath> pair_paths;
    for (const auto& pathj : pj.at("paths")) {
      if (!pathj.is_array())
        throw ConfigError("routing instance json: path must be an array of edge ids");
      EdgePath path;
      for (const auto& idj : pathj) {
        if (!idj.is_number_integer())
          throw ConfigError("routing instance json: edge id must be an integer");
        path.push_back(idj.get<Eigen::Index>());
      }
      pair_paths.push_back(std::move(path));
    }
    od_pairs.push_back(od);
    paths.push_back(std::move(pair_paths));
  }
  return TapInstance(vertices, std::move(edges), std::move(od_pairs), std::move(paths));
}

namespace {

ConstraintSystem constraints_from_json(const json& js, Eigen::Index n) {
  if (!js.is_object()) throw ConfigError("constraints json: expected an object");
  if (!js.contains("b")) throw ConfigError("constraints json: missing 'b'");
  const Vec b = vec_from_json(js.at("b"), "constraints json 'b'");
  const Eigen::Index m = b.size();
  Mat a;
  if (js.contains("dense")) {
    const auto& rows = js.at("dense");
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != m)
      throw ConfigError("constraints json: 'dense' must have one row per entry of b");
    a = Mat::Zero(m, n);
    Eigen::Index i = 0;
    for (const auto& rowj : rows) {
      const Vec row = vec_from_json(rowj, "constraints json row");
      if (row.size() != n)
        throw ConfigError("constraints json: row length does not match the dimension");
      a.row(i++) = row.transpose();
    }
  } else if (js.contains("sparse")) {
    const auto& sp = js.at("sparse");
    if (!sp.contains("shape") || !sp.at("shape").is_array() || sp.at("shape").size() != 2)
      throw ConfigError("constraints json: sparse form needs 'shape': [rows, cols]");
    const auto shape_m = sp.at("shape")[0].get<Eigen::Index>();
    const auto shape_n = sp.at("shape")[1].get<Eigen::Index>();
    if (shape_m != m || shape_n != n)
      throw ConfigError("constraints json: sparse shape disagrees with b or the dimension");
    a = Mat::Zero(m, n);
    if (!sp.contains("triplets") || !sp.at("triplets").is_array())
      throw ConfigError("constraints json: sparse form needs 'triplets'");
    for (const auto& tj : sp.at("triplets")) {
      if (!tj.is_array() || tj.size() != 3)
        throw ConfigError("constraints json: each triplet is [row, col, value]");
      const auto i = tj[0].get<Eigen::Index>();
      const auto j = tj[1].get<Eigen::Index>();
      if (i < 0 || i >= m || j < 0 || j >= n)
        throw ConfigError("constraints json: triplet index out of range");
      a(i, j) += tj[2].get<double>();
    }
  } else {
    throw ConfigError("constraints json: need 'dense' or 'sparse'");
  }
  return ConstraintSystem(a, b);
}

Mat mat_from_json(const json& js, const char* where) {
  if (!js.is_array() || js.empty())
    throw ConfigError(std::string(where) + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(js.size());
  Vec first = vec_from_json(js[0], where);
  Mat m(rows, first.size());
  m.row(0) = first.transpose();
  for (Eigen::Index i = 1; i < rows; ++i) {
    const Vec row = vec_from_json(js[static_cast<std::size_t>(i)], where);
    if (row.size() != first.size())
      throw ConfigError(std::string(where) + ": ragged rows");
    m.row(i) = row.transpose();
  }
  return m;
}

// Same evaluators and metadata, different declared Lipschitz bound. The
// original is captured by value so the rebuilt problem owns its evaluators.
Problem override_lipschitz(const Problem& original, double lipschitz_l) {
  if (!(lipschitz_l > 0.0))
    throw ConfigError("problem json: 'L' must be positive");
  Problem owned(
      [f = original](const Vec& x) { return f.value(x); },
      [f = original](const Vec& x) { return f.gradient(x); }, original.constraints(),
      lipschitz_l);
  if (original.known_optimum())
    owned.set_known_optimum(original.known_optimum()->x_star,
                            original.known_optimum()->f_star);
  if (original.default_start()) owned.set_default_start(*original.default_start());
  if (original.box_lift()) owned.set_box_lift(*original.box_lift());
  return owned;
}

}  // namespace

Problem problem_from_json(const json& js) {
  if (!js.is_object() || !js.contains("objective") || !js.at("objective").is_object())
    throw ConfigError("problem json: missing 'objective' object");
  const auto& obj = js.at("objective");
  if (!obj.contains("type") || !obj.at("type").is_string())
    throw ConfigError("problem json: objective needs a string 'type'");
  const auto type = obj.at("type").get<std::string>();

  std::optional<Problem> problem;
  if (type == "rosenbrock" || type == "beale") {
    if (js.contains("constraints"))
      throw ConfigError("problem json: box benchmarks carry their own constraints");
    problem = (type == "rosenbrock") ? make_rosenbrock_box() : make_beale_box();
  } else if (type == "quadratic") {
    if (!obj.contains("q")) throw ConfigError("problem json: quadratic needs 'q'");
    const Mat q = mat_from_json(obj.at("q"), "problem json 'q'");
    const Vec c = obj.contains("c") ? vec_from_json(obj.at("c"), "problem json 'c'")
                                    : Vec(Vec::Zero(q.rows()));
    ConstraintSystem cs = js.contains("constraints")
                              ? constraints_from_json(js.at("constraints"), q.rows())
                              : ConstraintSystem::unconstrained(q.rows());
    problem = make_quadratic(q, c, std::move(cs));
  } else if (type == "custom_qp") {
    if (js.contains("constraints"))
      throw ConfigError("problem json: generated instances carry their own constraints");
    const Eigen::Index n = require_index(obj, "n", "problem json custom_qp");
    const Eigen::Index m = require_index(obj, "m", "problem json custom_qp");
    const auto seed =
        static_cast<std::uint64_t>(require_index(obj, "seed", "problem json custom_qp"));
    Eigen::Index negative_eigs = 0;
    if (obj.contains("negative_eigs"))
      negative_eigs = require_index(obj, "negative_eigs", "problem json custom_qp");
    problem = (negative_eigs > 0) ? random_nonconvex_qp(n, m, negative_eigs, seed)
                                  : random_convex_qp(n, m, seed);
  } else {
    throw ConfigError("problem json: unknown objective type '" + type + "'");
  }

  if (js.contains("L"))
    problem = override_lipschitz(*problem, require_number(js, "L", "problem json"));
  if (js.contains("start")) {
    Vec start = vec_from_json(js.at("start"), "problem json 'start'");
    if (start.size() != problem->dimension())
      throw ConfigError("problem json: 'start' has the wrong dimension");
    problem->set_default_start(std::move(start));
  }
  return *problem;
}

}  // namespace hessbar
