#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "doctest.h"
#include "hessbar/errors.hpp"
#include "hessbar/kernels.hpp"
#include "hessbar/solver.hpp"
#include "hessbar/tap.hpp"
#include "test_utils.hpp"

using namespace hessbar;

namespace {

// Oracle: every simple path via exhaustive depth-first enumeration, then
// sorted by (hop count, lexicographic edge ids). Independent of the
// production deviation-based enumeration.
void collect_all_simple_paths(const DirectedGraph& g, Eigen::Index u, Eigen::Index dest,
                              std::vector<char>& visited, EdgePath& current,
                              std::vector<EdgePath>& out) {
  if (u == dest) {
    out.push_back(current);
    return;
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (g.edges[e].first != u) continue;
    const Eigen::Index w = g.edges[e].second;
    if (visited[static_cast<std::size_t>(w)]) continue;
    visited[static_cast<std::size_t>(w)] = 1;
    current.push_back(static_cast<Eigen::Index>(e));
    collect_all_simple_paths(g, w, dest, visited, current, out);
    current.pop_back();
    visited[static_cast<std::size_t>(w)] = 0;
  }
}

std::vector<EdgePath> oracle_paths(const DirectedGraph& g, Eigen::Index origin,
                                   Eigen::Index destination) {
  std::vector<char> visited(static_cast<std::size_t>(g.num_vertices), 0);
  visited[static_cast<std::size_t>(origin)] = 1;
  EdgePath current;
  std::vector<EdgePath> out;
  collect_all_simple_paths(g, origin, destination, visited, current, out);
  std::sort(out.begin(), out.end(), [](const EdgePath& a, const EdgePath& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

// Two vertices, one edge 0 -> 1 with cost 1 + w, demand 2 along the single path.
TapInstance single_edge_instance() {
  std::vector<DirectedEdge> edges{{0, 1, 1.0, 1.0}};
  std::vector<OdPair> pairs{{0, 1, 2.0}};
  std::vector<std::vector<EdgePath>> paths{{{0}}};
  return TapInstance(2, std::move(edges), std::move(pairs), std::move(paths));
}

// Diamond: 0 -> 1 -> 3 and 0 -> 2 -> 3.
DirectedGraph diamond_graph() {
  DirectedGraph g;
  g.num_vertices = 4;
  g.edges = {{0, 1}, {1, 3}, {0, 2}, {2, 3}};
  return g;
}

}  // namespace

TEST_CASE("preferential attachment: smallest case has four directed edges") {
  const DirectedGraph g = generate_barabasi_albert(3, 1, 42);
  CHECK(g.num_vertices == 3);
  REQUIRE(g.edges.size() == 4);  // two undirected links, each directed both ways
  // First join: vertex 1 attaches to the single seed vertex 0.
  CHECK(g.edges[0] == std::pair<Eigen::Index, Eigen::Index>{1, 0});
  CHECK(g.edges[1] == std::pair<Eigen::Index, Eigen::Index>{0, 1});
  // Second join: vertex 2 attaches to either 0 or 1.
  CHECK(g.edges[2].first == 2);
  CHECK((g.edges[2].second == 0 || g.edges[2].second == 1));
  CHECK(g.edges[3].first == g.edges[2].second);
  CHECK(g.edges[3].second == 2);
}

TEST_CASE("preferential attachment: edge budget, no self-loops, no parallel links") {
  const Eigen::Index n = 50, m = 2;
  const DirectedGraph g = generate_barabasi_albert(n, m, 7);
  CHECK(static_cast<Eigen::Index>(g.edges.size()) == 2 * (n - m) * m);
  std::set<std::pair<Eigen::Index, Eigen::Index>> undirected;
  for (const auto& [u, v] : g.edges) {
    CHECK(u != v);
    CHECK(u >= 0);
    CHECK(u < n);
    CHECK(v >= 0);
    CHECK(v < n);
    undirected.insert({std::min(u, v), std::max(u, v)});
  }
  // Each undirected link appears exactly once (as a directed pair).
  CHECK(static_cast<Eigen::Index>(undirected.size()) == (n - m) * m);
}

TEST_CASE("preferential attachment: deterministic in the seed") {
  const DirectedGraph a = generate_barabasi_albert(30, 2, 11);
  const DirectedGraph b = generate_barabasi_albert(30, 2, 11);
  CHECK(a.edges == b.edges);
}

TEST_CASE("preferential attachment: parameter validation") {
  CHECK_THROWS_AS(generate_barabasi_albert(5, 0, 0), ConfigError);
  CHECK_THROWS_AS(generate_barabasi_albert(2, 2, 0), ConfigError);
}

TEST_CASE("path enumeration: diamond yields both two-hop paths in id order") {
  const DirectedGraph g = diamond_graph();
  const auto paths = enumerate_min_hop_paths(g, 0, 3, 2);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == EdgePath{0, 1});
  CHECK(paths[1] == EdgePath{2, 3});
  // Asking for more than the graph admits returns what exists.
  CHECK(enumerate_min_hop_paths(g, 0, 3, 10).size() == 2);
}

TEST_CASE("path enumeration: matches exhaustive oracle on a generated network") {
  const DirectedGraph g = generate_barabasi_albert(7, 2, 3);
  for (Eigen::Index o = 0; o < g.num_vertices; ++o) {
    for (Eigen::Index d = 0; d < g.num_vertices; ++d) {
      if (o == d) continue;
      const auto expected = oracle_paths(g, o, d);
      REQUIRE(!expected.empty());  // both directions exist, so all pairs connect
      for (Eigen::Index k : {Eigen::Index{1}, Eigen::Index{3}, Eigen::Index{10000}}) {
        const auto got = enumerate_min_hop_paths(g, o, d, k);
        const auto want =
            std::min<std::size_t>(static_cast<std::size_t>(k), expected.size());
        REQUIRE(got.size() == want);
        for (std::size_t i = 0; i < want; ++i) CHECK(got[i] == expected[i]);
      }
    }
  }
}

TEST_CASE("path enumeration: paths are simple and distinct") {
  const DirectedGraph g = generate_barabasi_albert(12, 2, 9);
  const auto paths = enumerate_min_hop_paths(g, 0, 11, 25);
  std::set<EdgePath> seen;
  for (const auto& p : paths) {
    CHECK(seen.insert(p).second);
    std::set<Eigen::Index> vertices{0};
    Eigen::Index at = 0;
    for (Eigen::Index e : p) {
      CHECK(g.edges[static_cast<std::size_t>(e)].first == at);
      at = g.edges[static_cast<std::size_t>(e)].second;
      CHECK(vertices.insert(at).second);  // no vertex revisited
    }
    CHECK(at == 11);
  }
  // Non-decreasing hop counts, lexicographic within equal hops.
  for (std::size_t i = 1; i < paths.size(); ++i) {
    CHECK(paths[i - 1].size() <= paths[i].size());
    if (paths[i - 1].size() == paths[i].size()) CHECK(paths[i - 1] < paths[i]);
  }
}

TEST_CASE("path enumeration: unreachable destination and bad endpoints") {
  DirectedGraph g;
  g.num_vertices = 3;
  g.edges = {{0, 1}};
  CHECK_THROWS_AS(enumerate_min_hop_paths(g, 0, 2, 1), Unreachable);
  CHECK_THROWS_AS(enumerate_min_hop_paths(g, 0, 0, 1), ConfigError);
  CHECK_THROWS_AS(enumerate_min_hop_paths(g, 0, 5, 1), ConfigError);
  CHECK_THROWS_AS(enumerate_min_hop_paths(g, 0, 1, 0), ConfigError);
}

TEST_CASE("routing instance: validation rejects broken data") {
  std::vector<DirectedEdge> edges{{0, 1, 1.0, 1.0}, {1, 2, 2.0, 0.5}};
  std::vector<OdPair> pairs{{0, 2, 1.0}};
  SUBCASE("valid chain accepted") {
    std::vector<std::vector<EdgePath>> paths{{{0, 1}}};
    CHECK_NOTHROW(TapInstance(3, edges, pairs, paths));
  }
  SUBCASE("edges that do not chain") {
    std::vector<std::vector<EdgePath>> paths{{{1, 0}}};
    CHECK_THROWS_AS(TapInstance(3, edges, pairs, paths), ConfigError);
  }
  SUBCASE("path ends at the wrong vertex") {
    std::vector<std::vector<EdgePath>> paths{{{0}}};
    CHECK_THROWS_AS(TapInstance(3, edges, pairs, paths), ConfigError);
  }
  SUBCASE("negative cost coefficient") {
    auto bad = edges;
    bad[0].cost_a = -1.0;
    std::vector<std::vector<EdgePath>> paths{{{0, 1}}};
    CHECK_THROWS_AS(TapInstance(3, bad, pairs, paths), ConfigError);
  }
  SUBCASE("missing path set") {
    CHECK_THROWS_AS(TapInstance(3, edges, pairs, {}), ConfigError);
  }
}

TEST_CASE("routing objective: frozen single-edge values") {
  const TapInstance inst = single_edge_instance();
  Vec x(1);
  x << 2.0;
  // Load 2 on the only edge, cost 1 + 2 = 3.
  CHECK(tap_objective(inst, TapObjectiveMode::PathCostSum, x) == doctest::Approx(3.0));
  CHECK(tap_objective(inst, TapObjectiveMode::TotalEdgeLatency, x) == doctest::Approx(6.0));
  CHECK(tap_gradient(inst, TapObjectiveMode::PathCostSum, x)[0] == doctest::Approx(1.0));
  CHECK(tap_gradient(inst, TapObjectiveMode::TotalEdgeLatency, x)[0] ==
        doctest::Approx(5.0));  // a + 2 b w = 1 + 4
}

TEST_CASE("routing objective: zero flow limits") {
  const TapGenParams params{12, 6, 4, 2, 21};
  const TapInstance inst = generate_tap_instance(params);
  const Vec zero = Vec::Zero(inst.total_paths());
  double fixed_cost = 0.0;
  for (std::size_t e = 0; e < inst.edges().size(); ++e)
    fixed_cost += static_cast<double>(inst.edge_to_paths()[e].size()) * inst.edges()[e].cost_a;
  CHECK(tap_objective(inst, TapObjectiveMode::PathCostSum, zero) ==
        doctest::Approx(fixed_cost));
  CHECK(tap_objective(inst, TapObjectiveMode::TotalEdgeLatency, zero) == 0.0);
  const Vec grad = tap_gradient(inst, TapObjectiveMode::TotalEdgeLatency, zero);
  for (Eigen::Index q = 0; q < inst.total_paths(); ++q) {
    double sum_a = 0.0;
    for (Eigen::Index e : inst.path_at(q)) sum_a += inst.edges()[static_cast<std::size_t>(e)].cost_a;
    CHECK(grad[q] == doctest::Approx(sum_a));
  }
}

TEST_CASE("routing instance: loads are linear and uniform start is feasible") {
  const TapGenParams params{15, 8, 5, 2, 4};
  const TapInstance inst = generate_tap_instance(params);
  Rng rng(5, "tap-test-loads");
  Vec x(inst.total_paths()), y(inst.total_paths());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(0.0, 1.0);
    y[i] = rng.uniform(0.0, 1.0);
  }
  const Vec combined = inst.edge_loads(x + y);
  const Vec split = inst.edge_loads(x) + inst.edge_loads(y);
  CHECK((combined - split).cwiseAbs().maxCoeff() < 1e-12);

  const ConstraintSystem cs = inst.constraints();
  CHECK(cs.is_block_simplex());
  CHECK(cs.rows() == static_cast<Eigen::Index>(inst.od_pairs().size()));
  const Vec start = inst.uniform_start();
  CHECK(cs.feasibility_gap(start) < 1e-12);
  CHECK(start.minCoeff() > 0.0);
  // Every pair's block sums to its demand.
  for (std::size_t i = 0; i < inst.od_pairs().size(); ++i) {
    double total = 0.0;
    for (Eigen::Index q = inst.pair_offset(i); q < inst.pair_offset(i + 1); ++q)
      total += start[q];
    CHECK(total == doctest::Approx(inst.od_pairs()[i].demand));
  }
}

TEST_CASE("routing generator: structure and determinism") {
  const TapGenParams params{20, 15, 5, 2, 13};
  const TapInstance a = generate_tap_instance(params);
  CHECK(a.num_vertices() == 20);
  CHECK(static_cast<Eigen::Index>(a.od_pairs().size()) == 15);
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
  for (const OdPair& od : a.od_pairs()) {
    CHECK(od.origin != od.destination);
    CHECK(seen.insert({od.origin, od.destination}).second);  // no repeats
    CHECK(od.demand >= 1e-3);
    CHECK(od.demand <= 1.0);
  }
  for (const DirectedEdge& e : a.edges()) {
    CHECK(e.cost_a >= 0.0);
    CHECK(e.cost_a <= 10.0);
    CHECK(e.cost_b >= 0.0);
    CHECK(e.cost_b <= 1.0);
  }
  for (const auto& pair_paths : a.paths()) {
    CHECK(!pair_paths.empty());
    CHECK(static_cast<Eigen::Index>(pair_paths.size()) <= params.paths_per_pair);
  }

  const TapInstance b = generate_tap_instance(params);
  REQUIRE(b.edges().size() == a.edges().size());
  for (std::size_t e = 0; e < a.edges().size(); ++e) {
    CHECK(a.edges()[e].cost_a == b.edges()[e].cost_a);  // bitwise reproducible
    CHECK(a.edges()[e].cost_b == b.edges()[e].cost_b);
  }
  REQUIRE(b.od_pairs().size() == a.od_pairs().size());
  for (std::size_t i = 0; i < a.od_pairs().size(); ++i) {
    CHECK(a.od_pairs()[i].origin == b.od_pairs()[i].origin);
    CHECK(a.od_pairs()[i].destination == b.od_pairs()[i].destination);
    CHECK(a.od_pairs()[i].demand == b.od_pairs()[i].demand);
  }
  CHECK(a.paths() == b.paths());

  TapGenParams other = params;
  other.seed = 14;
  const TapInstance c = generate_tap_instance(other);
  bool any_difference = false;
  for (std::size_t e = 0; e < std::min(a.edges().size(), c.edges().size()); ++e)
    if (a.edges()[e].cost_a != c.edges()[e].cost_a) any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("routing generator: impossible request fails cleanly") {
  TapGenParams params;
  params.num_vertices = 4;
  params.num_od_pairs = 20;  // more than 4*3 ordered pairs
  params.paths_per_pair = 2;
  CHECK_THROWS_AS(generate_tap_instance(params), ConfigError);
}

TEST_CASE("routing problem: gradients match finite differences in both modes") {
  const TapGenParams params{12, 6, 4, 2, 7};
  auto inst = std::make_shared<const TapInstance>(generate_tap_instance(params));
  for (TapObjectiveMode mode :
       {TapObjectiveMode::PathCostSum, TapObjectiveMode::TotalEdgeLatency}) {
    const Problem problem = make_tap_problem(inst, mode);
    CHECK(problem.dimension() == inst->total_paths());
    REQUIRE(problem.default_start().has_value());
    const Vec x0 = *problem.default_start();
    CHECK(hessbar::testing::gradient_mismatch(problem, x0) < 1e-5);
    Rng rng(3, "tap-test-perturb");
    Vec x = x0;
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] *= rng.uniform(0.5, 1.5);
    CHECK(hessbar::testing::gradient_mismatch(problem, x) < 1e-5);
  }
}

TEST_CASE("routing problem: curvature bound matches a dense reconstruction") {
  const TapGenParams params{12, 6, 4, 2, 19};
  auto inst = std::make_shared<const TapInstance>(generate_tap_instance(params));
  const Problem problem = make_tap_problem(inst, TapObjectiveMode::TotalEdgeLatency);
  const Eigen::Index n = inst->total_paths();
  Mat hess = Mat::Zero(n, n);  // H(p,q) = sum over shared edges of 2 b_e
  for (std::size_t e = 0; e < inst->edges().size(); ++e) {
    const double two_b = 2.0 * inst->edges()[e].cost_b;
    for (Eigen::Index p : inst->edge_to_paths()[e])
      for (Eigen::Index q : inst->edge_to_paths()[e]) hess(p, q) += two_b;
  }
  const double dense_norm = spectral_norm(hess);
  CHECK(problem.lipschitz() == doctest::Approx(dense_norm).epsilon(1e-6));

  const Problem linear = make_tap_problem(inst, TapObjectiveMode::PathCostSum);
  CHECK(linear.lipschitz() == 1.0);
  // Constant gradient: same value everywhere.
  const Vec g0 = linear.gradient(*linear.default_start());
  const Vec g1 = linear.gradient(2.0 * *linear.default_start());
  CHECK((g0 - g1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("routing problem: barrier solve and mirror descent both reduce latency") {
  const TapGenParams params{15, 8, 5, 2, 31};
  auto inst = std::make_shared<const TapInstance>(generate_tap_instance(params));
  const Problem problem = make_tap_problem(inst, TapObjectiveMode::TotalEdgeLatency);
  const Vec x0 = *problem.default_start();
  const double f0 = problem.value(x0);

  SolverConfig config;
  config.max_iterations = 300;
  const SolveReport report = hba_solve(problem, x0, make_gibbs(0.0), config);
  CHECK(report.final_f() < f0);
  CHECK(report.invariants.max_sufficient_decrease_violation <= 0.0);
  CHECK(report.final_x.minCoeff() > 0.0);
  CHECK(problem.constraints().feasibility_gap(report.final_x) < 1e-8);

  MdSchedule schedule;
  schedule.base_step = 0.05;
  const SolveReport md = mirror_descent_solve(problem, x0, schedule, config);
  CHECK(md.final_f() < f0);
}
