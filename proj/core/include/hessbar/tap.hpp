#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "hessbar/problems.hpp"

namespace hessbar {

// Edge ids index the edge list; parallel edges are distinct ids.
struct DirectedGraph {
  Eigen::Index num_vertices = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;  // (from, to)
};

// Preferential attachment: start from `attachment_m` isolated seed vertices,
// then connect each new vertex to `attachment_m` distinct existing vertices
// drawn proportionally to degree (first newcomer takes the seed vertices).
// Every undirected link k becomes the opposed directed pair 2k (source to
// target) and 2k+1 (target to source).
DirectedGraph generate_barabasi_albert(Eigen::Index num_vertices, Eigen::Index attachment_m,
                                       std::uint64_t seed);

using EdgePath = std::vector<Eigen::Index>;  // consecutive edge ids, heads to tails

// Up to k distinct simple paths in increasing (hop count, lexicographic
// edge-id sequence) order, via a k-shortest-simple-paths sweep with unit
// weights. Throws Unreachable when no path exists; returns fewer than k when
// the graph admits fewer.
std::vector<EdgePath> enumerate_min_hop_paths(const DirectedGraph& graph,
                                              Eigen::Index origin,
                                              Eigen::Index destination, Eigen::Index k);

struct DirectedEdge {
  Eigen::Index from = 0;
  Eigen::Index to = 0;
  double cost_a = 0.0;  // latency at zero load
  double cost_b = 0.0;  // latency slope per unit load
};

struct OdPair {
  Eigen::Index origin = 0;
  Eigen::Index destination = 0;
  double demand = 0.0;
};

// Aggregate-latency flavor:
//   PathCostSum       sum over paths of the path's edge costs at current loads
//                     = sum_e kappa_e * c_e(w_e)     (linear in flows)
//   TotalEdgeLatency  sum_e w_e * c_e(w_e)           (convex quadratic)
enum class TapObjectiveMode { PathCostSum, TotalEdgeLatency };

// Routing game data: network, demands, admissible paths. Flow vectors are
// indexed by flat path index (pairs in order, each pair's paths in order).
class TapInstance {
 public:
  TapInstance(Eigen::Index num_vertices, std::vector<DirectedEdge> edges,
              std::vector<OdPair> od_pairs, std::vector<std::vector<EdgePath>> paths);

  Eigen::Index num_vertices() const { return num_vertices_; }
  const std::vector<DirectedEdge>& edges() const { return edges_; }
  const std::vector<OdPair>& od_pairs() const { return od_pairs_; }
  const std::vector<std::vector<EdgePath>>& paths() const { return paths_; }

  Eigen::Index total_paths() const { return total_paths_; }
  Eigen::Index pair_offset(std::size_t pair_index) const;
  const EdgePath& path_at(Eigen::Index flat_index) const;

  // paths using each edge (the incidence transpose); kappa_e is its size
  const std::vector<std::vector<Eigen::Index>>& edge_to_paths() const {
    return edge_to_paths_;
  }

  Vec edge_loads(const Vec& x) const;

  // Demand split equally across each pair's paths.
  Vec uniform_start() const;

  // One demand row per O/D pair over its flat path indices (block-simplex).
  ConstraintSystem constraints() const;

 private:
  Eigen::Index num_vertices_;
  std::vector<DirectedEdge> edges_;
  std::vector<OdPair> od_pairs_;
  std::vector<std::vector<EdgePath>> paths_;
  std::vector<Eigen::Index> pair_offsets_;
  Eigen::Index total_paths_ = 0;
  std::vector<const EdgePath*> flat_paths_;
  std::vector<std::vector<Eigen::Index>> edge_to_paths_;
};

struct TapGenParams {
  Eigen::Index num_vertices = 50;
  Eigen::Index num_od_pairs = 100;
  Eigen::Index paths_per_pair = 20;
  Eigen::Index attachment_m = 2;
  std::uint64_t seed = 0;
};

// Random network, costs, demands, O/D pairs, and min-hop path sets:
//   edge costs  a ~ U[0,10], b ~ U[0,1], independent per directed edge
//   O/D pairs   ordered (o,d), o != d, d reachable from o, no repeats
//   demands     U[1e-3, 1] (a zero demand would pin its block to the
//               boundary, so the lower end is clipped away)
// Throws GenerationFailed when the O/D sampler runs out of retries.
TapInstance generate_tap_instance(const TapGenParams& params);

double tap_objective(const TapInstance& instance, TapObjectiveMode mode, const Vec& x);
Vec tap_gradient(const TapInstance& instance, TapObjectiveMode mode, const Vec& x);

// Wrap as a Problem: block-simplex constraints, uniform default start,
// Lipschitz bound from the load-space Hessian (power iteration; the linear
// PathCostSum mode uses the unit fallback).
Problem make_tap_problem(std::shared_ptr<const TapInstance> instance,
                         TapObjectiveMode mode);

}  // namespace hessbar
