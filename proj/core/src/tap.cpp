#include "hessbar/tap.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "hessbar/errors.hpp"

namespace hessbar {

DirectedGraph generate_barabasi_albert(Eigen::Index num_vertices, Eigen::Index attachment_m,
                                       std::uint64_t seed) {
  if (attachment_m < 1)
    throw ConfigError("preferential attachment: attachment count must be at least 1");
  if (num_vertices < attachment_m + 1)
    throw ConfigError(
        "preferential attachment: need more vertices than the attachment count, got " +
        std::to_string(num_vertices) + " vertices for attachment " +
        std::to_string(attachment_m));

  Rng rng(seed, "preferential-attachment");
  std::vector<std::pair<Eigen::Index, Eigen::Index>> undirected;
  // One entry per edge endpoint, so sampling an index uniformly weights each
  // vertex by its degree.
  std::vector<Eigen::Index> endpoint_pool;
  std::vector<Eigen::Index> targets;
  targets.reserve(static_cast<std::size_t>(attachment_m));
  for (Eigen::Index v = 0; v < attachment_m; ++v) targets.push_back(v);

  for (Eigen::Index source = attachment_m; source < num_vertices; ++source) {
    for (Eigen::Index target : targets) {
      undirected.emplace_back(source, target);
      endpoint_pool.push_back(target);
      endpoint_pool.push_back(source);
    }
    if (source + 1 == num_vertices) break;  // no further joins need targets
    std::set<Eigen::Index> chosen;  // ascending; re-draw until m distinct
    while (static_cast<Eigen::Index>(chosen.size()) < attachment_m) {
      const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(endpoint_pool.size()) - 1);
      chosen.insert(endpoint_pool[static_cast<std::size_t>(pick)]);
    }
    targets.assign(chosen.begin(), chosen.end());
  }

  DirectedGraph graph;
  graph.num_vertices = num_vertices;
  graph.edges.reserve(2 * undirected.size());
  for (const auto& [u, v] : undirected) {
    graph.edges.emplace_back(u, v);
    graph.edges.emplace_back(v, u);
  }
  return graph;
}

namespace {

// (hop count, lexicographic edge-id sequence): the enumeration order.
struct PathOrder {
  bool operator()(const EdgePath& a, const EdgePath& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

struct Adjacency {
  std::vector<std::vector<Eigen::Index>> out;  // edge ids ascending per tail
  std::vector<std::vector<Eigen::Index>> in;   // edge ids ascending per head
};

Adjacency build_adjacency(const DirectedGraph& graph) {
  Adjacency adj;
  adj.out.resize(static_cast<std::size_t>(graph.num_vertices));
  adj.in.resize(static_cast<std::size_t>(graph.num_vertices));
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    adj.out[static_cast<std::size_t>(graph.edges[e].first)].push_back(
        static_cast<Eigen::Index>(e));
    adj.in[static_cast<std::size_t>(graph.edges[e].second)].push_back(
        static_cast<Eigen::Index>(e));
  }
  return adj;
}

// Minimum-hop simple path that is lexicographically smallest in its edge-id
// sequence among minimum-hop paths, avoiding banned edges and vertices.
// Hop distances to the destination come from a backward breadth-first sweep;
// the forward walk then greedily takes the smallest edge id that still steps
// one hop closer, which pins down the lexicographic minimum.
std::optional<EdgePath> lex_min_path(const DirectedGraph& graph, const Adjacency& adj,
                                     Eigen::Index origin, Eigen::Index destination,
                                     const std::vector<char>& edge_banned,
                                     const std::vector<char>& vertex_banned) {
  constexpr Eigen::Index kUnreached = -1;
  std::vector<Eigen::Index> dist(static_cast<std::size_t>(graph.num_vertices), kUnreached);
  std::deque<Eigen::Index> queue;
  dist[static_cast<std::size_t>(destination)] = 0;
  queue.push_back(destination);
  while (!queue.empty()) {
    const Eigen::Index v = queue.front();
    queue.pop_front();
    for (Eigen::Index e : adj.in[static_cast<std::size_t>(v)]) {
      if (edge_banned[static_cast<std::size_t>(e)]) continue;
      const Eigen::Index u = graph.edges[static_cast<std::size_t>(e)].first;
      if (vertex_banned[static_cast<std::size_t>(u)]) continue;
      if (dist[static_cast<std::size_t>(u)] != kUnreached) continue;
      dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
      queue.push_back(u);
    }
  }
  if (dist[static_cast<std::size_t>(origin)] == kUnreached) return std::nullopt;

  EdgePath path;
  path.reserve(static_cast<std::size_t>(dist[static_cast<std::size_t>(origin)]));
  Eigen::Index u = origin;
  while (u != destination) {
    Eigen::Index best = kUnreached;
    for (Eigen::Index e : adj.out[static_cast<std::size_t>(u)]) {  // ascending ids
      if (edge_banned[static_cast<std::size_t>(e)]) continue;
      const Eigen::Index w = graph.edges[static_cast<std::size_t>(e)].second;
      if (vertex_banned[static_cast<std::size_t>(w)]) continue;
      if (dist[static_cast<std::size_t>(w)] == dist[static_cast<std::size_t>(u)] - 1) {
        best = e;
        break;
      }
    }
    // dist[u] is finite and computed under the same bans, so a step exists.
    path.push_back(best);
    u = graph.edges[static_cast<std::size_t>(best)].second;
  }
  return path;
}

}  // namespace

std::vector<EdgePath> enumerate_min_hop_paths(const DirectedGraph& graph,
                                              Eigen::Index origin,
                                              Eigen::Index destination, Eigen::Index k) {
  if (origin < 0 || origin >= graph.num_vertices || destination < 0 ||
      destination >= graph.num_vertices)
    throw ConfigError("path enumeration: endpoint out of range");
  if (origin == destination)
    throw ConfigError("path enumeration: origin and destination must differ");
  if (k < 1) throw ConfigError("path enumeration: need at least one path");

  const Adjacency adj = build_adjacency(graph);
  std::vector<char> edge_banned(graph.edges.size(), 0);
  std::vector<char> vertex_banned(static_cast<std::size_t>(graph.num_vertices), 0);

  auto first = lex_min_path(graph, adj, origin, destination, edge_banned, vertex_banned);
  if (!first)
    throw Unreachable("path enumeration: destination " + std::to_string(destination) +
                      " unreachable from origin " + std::to_string(origin));

  std::vector<EdgePath> accepted{std::move(*first)};
  std::set<EdgePath, PathOrder> candidates;
  std::set<EdgePath> generated;  // accepted + pending, to drop repeats
  generated.insert(accepted.front());

  while (static_cast<Eigen::Index>(accepted.size()) < k) {
    const EdgePath prev = accepted.back();  // copy: accepted grows below
    std::vector<Eigen::Index> prev_vertices;
    prev_vertices.reserve(prev.size() + 1);
    prev_vertices.push_back(origin);
    for (Eigen::Index e : prev)
      prev_vertices.push_back(graph.edges[static_cast<std::size_t>(e)].second);

    for (std::size_t spur = 0; spur < prev.size(); ++spur) {
      std::fill(edge_banned.begin(), edge_banned.end(), 0);
      std::fill(vertex_banned.begin(), vertex_banned.end(), 0);
      // Branch away from every accepted path sharing this root prefix.
      for (const EdgePath& p : accepted) {
        if (p.size() > spur && std::equal(prev.begin(), prev.begin() + spur, p.begin()))
          edge_banned[static_cast<std::size_t>(p[spur])] = 1;
      }
      // Keep the candidate simple: the root's vertices may not reappear.
      for (std::size_t j = 0; j < spur; ++j)
        vertex_banned[static_cast<std::size_t>(prev_vertices[j])] = 1;

      auto tail = lex_min_path(graph, adj, prev_vertices[spur], destination, edge_banned,
                               vertex_banned);
      if (!tail) continue;
      EdgePath candidate(prev.begin(), prev.begin() + spur);
      candidate.insert(candidate.end(), tail->begin(), tail->end());
      if (generated.insert(candidate).second) candidates.insert(std::move(candidate));
    }

    if (candidates.empty()) break;  // graph admits no further simple paths
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

TapInstance::TapInstance(Eigen::Index num_vertices, std::vector<DirectedEdge> edges,
                         std::vector<OdPair> od_pairs,
                         std::vector<std::vector<EdgePath>> paths)
    : num_vertices_(num_vertices),
      edges_(std::move(edges)),
      od_pairs_(std::move(od_pairs)),
      paths_(std::move(paths)) {
  if (num_vertices_ < 1) throw ConfigError("routing instance: need at least one vertex");
  if (paths_.size() != od_pairs_.size())
    throw ConfigError("routing instance: one path set per O/D pair required");
  for (const DirectedEdge& e : edges_) {
    if (e.from < 0 || e.from >= num_vertices_ || e.to < 0 || e.to >= num_vertices_)
      throw ConfigError("routing instance: edge endpoint out of range");
    if (!(e.cost_a >= 0.0) || !(e.cost_b >= 0.0))
      throw ConfigError("routing instance: edge cost coefficients must be nonnegative");
  }

  pair_offsets_.reserve(od_pairs_.size() + 1);
  pair_offsets_.push_back(0);
  for (std::size_t i = 0; i < od_pairs_.size(); ++i) {
    const OdPair& od = od_pairs_[i];
    if (od.origin < 0 || od.origin >= num_vertices_ || od.destination < 0 ||
        od.destination >= num_vertices_)
      throw ConfigError("routing instance: O/D endpoint out of range");
    if (od.origin == od.destination)
      throw ConfigError("routing instance: O/D endpoints must differ");
    if (!(od.demand >= 0.0)) throw ConfigError("routing instance: demand must be nonnegative");
    if (paths_[i].empty())
      throw ConfigError("routing instance: every O/D pair needs at least one path");
    for (const EdgePath& path : paths_[i]) {
      if (path.empty()) throw ConfigError("routing instance: empty path");
      Eigen::Index at = od.origin;
      for (Eigen::Index e : path) {
        if (e < 0 || e >= static_cast<Eigen::Index>(edges_.size()))
          throw ConfigError("routing instance: path references unknown edge");
        if (edges_[static_cast<std::size_t>(e)].from != at)
          throw ConfigError("routing instance: path edges do not chain");
        at = edges_[static_cast<std::size_t>(e)].to;
      }
      if (at != od.destination)
        throw ConfigError("routing instance: path does not end at the destination");
    }
    total_paths_ += static_cast<Eigen::Index>(paths_[i].size());
    pair_offsets_.push_back(total_paths_);
  }

  flat_paths_.reserve(static_cast<std::size_t>(total_paths_));
  for (const auto& pair_paths : paths_)
    for (const EdgePath& path : pair_paths) flat_paths_.push_back(&path);

  edge_to_paths_.resize(edges_.size());
  for (Eigen::Index q = 0; q < total_paths_; ++q)
    for (Eigen::Index e : *flat_paths_[static_cast<std::size_t>(q)])
      edge_to_paths_[static_cast<std::size_t>(e)].push_back(q);
}

Eigen::Index TapInstance::pair_offset(std::size_t pair_index) const {
  return pair_offsets_.at(pair_index);
}

const EdgePath& TapInstance::path_at(Eigen::Index flat_index) const {
  return *flat_paths_.at(static_cast<std::size_t>(flat_index));
}

Vec TapInstance::edge_loads(const Vec& x) const {
  if (x.size() != total_paths_)
    throw StructuralMismatch("routing instance: flow vector has wrong dimension");
  Vec loads = Vec::Zero(static_cast<Eigen::Index>(edges_.size()));
  for (Eigen::Index q = 0; q < total_paths_; ++q)
    for (Eigen::Index e : *flat_paths_[static_cast<std::size_t>(q)]) loads[e] += x[q];
  return loads;
}

Vec TapInstance::uniform_start() const {
  Vec x(total_paths_);
  for (std::size_t i = 0; i < od_pairs_.size(); ++i) {
    const double share = od_pairs_[i].demand / static_cast<double>(paths_[i].size());
    for (Eigen::Index q = pair_offsets_[i]; q < pair_offsets_[i + 1]; ++q) x[q] = share;
  }
  return x;
}

ConstraintSystem TapInstance::constraints() const {
  const auto num_pairs = static_cast<Eigen::Index>(od_pairs_.size());
  Mat a = Mat::Zero(num_pairs, total_paths_);
  Vec b(num_pairs);
  for (std::size_t i = 0; i < od_pairs_.size(); ++i) {
    for (Eigen::Index q = pair_offsets_[i]; q < pair_offsets_[i + 1]; ++q)
      a(static_cast<Eigen::Index>(i), q) = 1.0;
    b[static_cast<Eigen::Index>(i)] = od_pairs_[i].demand;
  }
  return ConstraintSystem(a, b);
}

TapInstance generate_tap_instance(const TapGenParams& params) {
  if (params.num_od_pairs < 1)
    throw ConfigError("routing generator: need at least one O/D pair");
  if (params.paths_per_pair < 1)
    throw ConfigError("routing generator: need at least one path per pair");
  const Eigen::Index max_ordered_pairs = params.num_vertices * (params.num_vertices - 1);
  if (params.num_od_pairs > max_ordered_pairs)
    throw ConfigError("routing generator: more O/D pairs than ordered vertex pairs");

  const DirectedGraph graph =
      generate_barabasi_albert(params.num_vertices, params.attachment_m, params.seed);

  std::vector<DirectedEdge> edges;
  edges.reserve(graph.edges.size());
  {
    Rng cost_rng(params.seed, "edge-costs");
    for (const auto& [u, v] : graph.edges) {
      DirectedEdge e;
      e.from = u;
      e.to = v;
      e.cost_a = cost_rng.uniform(0.0, 10.0);
      e.cost_b = cost_rng.uniform(0.0, 1.0);
      edges.push_back(e);
    }
  }

  // Reachability table via forward breadth-first sweeps (vertex counts are
  // small; preferential-attachment graphs with both edge directions are
  // strongly connected, so this mostly guards hand-built graphs).
  const Adjacency adj = build_adjacency(graph);
  std::vector<std::vector<char>> reachable(static_cast<std::size_t>(graph.num_vertices));
  for (Eigen::Index s = 0; s < graph.num_vertices; ++s) {
    auto& row = reachable[static_cast<std::size_t>(s)];
    row.assign(static_cast<std::size_t>(graph.num_vertices), 0);
    std::deque<Eigen::Index> queue{s};
    row[static_cast<std::size_t>(s)] = 1;
    while (!queue.empty()) {
      const Eigen::Index u = queue.front();
      queue.pop_front();
      for (Eigen::Index e : adj.out[static_cast<std::size_t>(u)]) {
        const Eigen::Index w = graph.edges[static_cast<std::size_t>(e)].second;
        if (!row[static_cast<std::size_t>(w)]) {
          row[static_cast<std::size_t>(w)] = 1;
          queue.push_back(w);
        }
      }
    }
  }

  Rng od_rng(params.seed, "od-pairs");
  std::set<std::pair<Eigen::Index, Eigen::Index>> chosen;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> ordered;  // acceptance order
  const std::int64_t retry_budget = 1000 * static_cast<std::int64_t>(params.num_od_pairs);
  std::int64_t attempts = 0;
  while (static_cast<Eigen::Index>(ordered.size()) < params.num_od_pairs) {
    if (++attempts > retry_budget)
      throw GenerationFailed(
          "routing generator: could not sample the requested O/D pairs; the "
          "network has too few mutually reachable ordered pairs");
    const auto o = static_cast<Eigen::Index>(od_rng.uniform_int(0, graph.num_vertices - 1));
    const auto d = static_cast<Eigen::Index>(od_rng.uniform_int(0, graph.num_vertices - 1));
    if (o == d) continue;
    if (!reachable[static_cast<std::size_t>(o)][static_cast<std::size_t>(d)]) continue;
    if (!chosen.insert({o, d}).second) continue;
    ordered.emplace_back(o, d);
  }

  Rng demand_rng(params.seed, "demands");
  std::vector<OdPair> od_pairs;
  od_pairs.reserve(ordered.size());
  for (const auto& [o, d] : ordered) {
    OdPair od;
    od.origin = o;
    od.destination = d;
    od.demand = demand_rng.uniform(1e-3, 1.0);
    od_pairs.push_back(od);
  }

  std::vector<std::vector<EdgePath>> paths;
  paths.reserve(od_pairs.size());
  for (const OdPair& od : od_pairs)
    paths.push_back(
        enumerate_min_hop_paths(graph, od.origin, od.destination, params.paths_per_pair));

  return TapInstance(graph.num_vertices, std::move(edges), std::move(od_pairs),
                     std::move(paths));
}

double tap_objective(const TapInstance& instance, TapObjectiveMode mode, const Vec& x) {
  const Vec loads = instance.edge_loads(x);
  const auto& edges = instance.edges();
  double total = 0.0;
  if (mode == TapObjectiveMode::PathCostSum) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto kappa = static_cast<double>(instance.edge_to_paths()[e].size());
      total += kappa * (edges[e].cost_a + edges[e].cost_b * loads[static_cast<Eigen::Index>(e)]);
    }
  } else {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double w = loads[static_cast<Eigen::Index>(e)];
      total += w * (edges[e].cost_a + edges[e].cost_b * w);
    }
  }
  return total;
}

Vec tap_gradient(const TapInstance& instance, TapObjectiveMode mode, const Vec& x) {
  const auto& edges = instance.edges();
  Vec grad = Vec::Zero(instance.total_paths());
  if (mode == TapObjectiveMode::PathCostSum) {
    if (x.size() != instance.total_paths())
      throw StructuralMismatch("routing instance: flow vector has wrong dimension");
    // Loads enter only through the slope terms, so the gradient is constant.
    for (Eigen::Index q = 0; q < instance.total_paths(); ++q) {
      double g = 0.0;
      for (Eigen::Index e : instance.path_at(q)) {
        const auto kappa =
            static_cast<double>(instance.edge_to_paths()[static_cast<std::size_t>(e)].size());
        g += kappa * edges[static_cast<std::size_t>(e)].cost_b;
      }
      grad[q] = g;
    }
  } else {
    const Vec loads = instance.edge_loads(x);
    for (Eigen::Index q = 0; q < instance.total_paths(); ++q) {
      double g = 0.0;
      for (Eigen::Index e : instance.path_at(q)) {
        const auto& edge = edges[static_cast<std::size_t>(e)];
        g += edge.cost_a + 2.0 * edge.cost_b * loads[e];
      }
      grad[q] = g;
    }
  }
  return grad;
}

namespace {

// ||M^T diag(2b) M||_2 by matrix-free power iteration, where M is the
// edge-by-path incidence matrix: the gradient Lipschitz constant of the
// TotalEdgeLatency objective over path flows.
double latency_hessian_norm(const TapInstance& instance) {
  const Eigen::Index n = instance.total_paths();
  Rng rng(0x5bd1e995u, "latency-curvature");  // fixed stream: same instance, same estimate
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  const double vnorm = v.norm();
  if (vnorm == 0.0) return 0.0;
  v /= vnorm;
  double estimate = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    const Vec loads = instance.edge_loads(v);
    Vec w = Vec::Zero(n);
    for (Eigen::Index q = 0; q < n; ++q) {
      double acc = 0.0;
      for (Eigen::Index e : instance.path_at(q))
        acc += 2.0 * instance.edges()[static_cast<std::size_t>(e)].cost_b * loads[e];
      w[q] = acc;
    }
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;
    v = w / wnorm;
    if (std::abs(wnorm - estimate) <= 1e-8 * std::max(1.0, wnorm)) {
      estimate = wnorm;
      break;
    }
    estimate = wnorm;
  }
  return estimate;
}

}  // namespace

Problem make_tap_problem(std::shared_ptr<const TapInstance> instance,
                         TapObjectiveMode mode) {
  if (!instance) throw ConfigError("routing problem: null instance");
  double lipschitz_l = 1.0;  // PathCostSum is linear: constant gradient
  if (mode == TapObjectiveMode::TotalEdgeLatency) {
    lipschitz_l = latency_hessian_norm(*instance);
    if (lipschitz_l == 0.0) lipschitz_l = 1.0;  // all slopes zero: again linear
  }
  Problem problem(
      [instance, mode](const Vec& x) { return tap_objective(*instance, mode, x); },
      [instance, mode](const Vec& x) -> Vec { return tap_gradient(*instance, mode, x); },
      instance->constraints(), lipschitz_l);
  problem.set_default_start(instance->uniform_start());
  return problem;
}

}  // namespace hessbar
