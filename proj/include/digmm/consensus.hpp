#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "digmm/gmm.hpp"

namespace digmm::consensus {

// Undirected connected communication graph with symmetric averaging weights.
// The default edge weight is the adjacency coefficient 2/(D_m + D_i + 1);
// when that leaves some node with a negative self-weight (or a
// non-contracting matrix) the whole graph falls back to Metropolis weights
// min(1/(D_m+1), 1/(D_i+1)).
struct Topology {
  int num_nodes = 0;
  int num_edges = 0;
  std::vector<std::vector<int>> neighbors;  // sorted, 0-based
  std::vector<int> degree;
  Matrix weights;  // symmetric, row-stochastic; weights(m,i) == zeta_{m,i}
  bool metropolis_fallback = false;
  std::string warning;
  double lambda2 = 0.0;  // spectral radius of W - (1/M) 11', measured at build

  double zeta(int m, int i) const { return weights(m, i); }
};

struct Config {
  double tolerance = 1e-12;  // max per-round change, relative to input scale
  int max_rounds = 200000;
  enum class Mode { OracleStop, FixedRounds };
  Mode mode = Mode::OracleStop;
};

// Edges are 0-based pairs. Throws on self-loops, duplicates, out-of-range
// ids, or a disconnected graph.
Topology build_topology(const std::vector<std::pair<int, int>>& edges,
                        int num_nodes);

// One synchronous averaging round: every node moves toward its neighbors,
// x_m += sum_i zeta_{m,i} (x_i - x_m). Double-buffered; reads only
// neighbor values. Scalars are width-1 vectors.
std::vector<Vector> consensus_round(const Topology& topo,
                                    const std::vector<Vector>& values);

struct SumResult {
  std::vector<Vector> per_node;  // every node's estimate of the global sum
  int rounds = 0;
};

using RoundObserver = std::function<void(const std::vector<Vector>&)>;

// Runs averaging to convergence and scales by M, so each node ends with the
// sum of all local values. Oracle-stop halts when the largest per-round
// change falls under tolerance * max(1, |inputs|_inf); fixed-rounds runs
// ceil(log tol / log lambda2) rounds.
SumResult global_sum(const Topology& topo, const std::vector<Vector>& locals,
                     const Config& cfg, const RoundObserver& observer = {});

// Assembles a width-wide vector from per-node sparse contributions: node m
// must be zero outside entries m and m + width/2. Same convergence rules.
SumResult vector_collect(const Topology& topo,
                         const std::vector<Vector>& contributions, int width,
                         const Config& cfg);

Topology load_topology_json(const std::string& path);  // 1-based ids in file

}  // namespace digmm::consensus
