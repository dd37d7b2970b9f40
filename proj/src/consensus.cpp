#include "digmm/consensus.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

namespace digmm::consensus {

namespace {

void check_connected(const Topology& topo) {
  std::vector<bool> seen(topo.num_nodes, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int visited = 1;
  while (!stack.empty()) {
    const int m = stack.back();
    stack.pop_back();
    for (int i : topo.neighbors[m])
      if (!seen[i]) {
        seen[i] = true;
        ++visited;
        stack.push_back(i);
      }
  }
  if (visited != topo.num_nodes)
    throw std::invalid_argument("communication graph is disconnected");
}

void fill_weights(Topology& topo, bool metropolis) {
  const int n = topo.num_nodes;
  topo.weights = Matrix::Zero(n, n);
  for (int m = 0; m < n; ++m)
    for (int i : topo.neighbors[m]) {
      topo.weights(m, i) =
          metropolis
              ? std::min(1.0 / (topo.degree[m] + 1), 1.0 / (topo.degree[i] + 1))
              : 2.0 / (topo.degree[m] + topo.degree[i] + 1);
    }
}

// Stochasticity of the averaging matrix: a negative self-weight breaks it.
bool self_weights_admissible(const Topology& topo) {
  for (int m = 0; m < topo.num_nodes; ++m) {
    double s = 0.0;
    for (int i : topo.neighbors[m]) s += topo.weights(m, i);
    if (1.0 - s < 0.0) return false;
  }
  return true;
}

double measure_lambda2(const Topology& topo) {
  const int n = topo.num_nodes;
  Matrix w = topo.weights;
  for (int m = 0; m < n; ++m) w(m, m) = 1.0 - topo.weights.row(m).sum();
  Matrix deviation = w - Matrix::Constant(n, n, 1.0 / n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(deviation);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

int fixed_round_count(const Topology& topo, const Config& cfg) {
  if (topo.num_nodes == 1 || topo.lambda2 <= 0.0) return 0;
  return static_cast<int>(
      std::ceil(std::log(cfg.tolerance) / std::log(topo.lambda2)));
}

SumResult run_average(const Topology& topo, const std::vector<Vector>& init,
                      const Config& cfg, const RoundObserver& observer) {
  if (static_cast<int>(init.size()) != topo.num_nodes)
    throw std::invalid_argument("one value per node required");
  const Eigen::Index width = init.empty() ? 0 : init.front().size();
  for (const auto& v : init)
    if (v.size() != width)
      throw std::invalid_argument("per-node values must share width");

  double scale = 1.0;
  for (const auto& v : init)
    if (v.size() > 0) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  const double tol_abs = cfg.tolerance * scale;

  SumResult result;
  result.per_node = init;
  if (observer) observer(result.per_node);

  if (cfg.mode == Config::Mode::FixedRounds) {
    const int rounds = fixed_round_count(topo, cfg);
    for (int t = 0; t < rounds; ++t) {
      result.per_node = consensus_round(topo, result.per_node);
      if (observer) observer(result.per_node);
    }
    result.rounds = rounds;
    return result;
  }

  for (int t = 0; t < cfg.max_rounds; ++t) {
    std::vector<Vector> next = consensus_round(topo, result.per_node);
    double change = 0.0;
    for (int m = 0; m < topo.num_nodes; ++m)
      if (width > 0)
        change = std::max(change,
                          (next[m] - result.per_node[m]).cwiseAbs().maxCoeff());
    if (change < tol_abs) return result;  // converged; round not committed
    result.per_node = std::move(next);
    ++result.rounds;
    if (observer) observer(result.per_node);
  }
  double residual = 0.0;
  {
    std::vector<Vector> next = consensus_round(topo, result.per_node);
    for (int m = 0; m < topo.num_nodes; ++m)
      if (width > 0)
        residual = std::max(
            residual, (next[m] - result.per_node[m]).cwiseAbs().maxCoeff());
  }
  throw NonConvergence("consensus did not converge within max_rounds",
                       residual);
}

}  // namespace

Topology build_topology(const std::vector<std::pair<int, int>>& edges,
                        int num_nodes) {
  if (num_nodes < 1) throw std::invalid_argument("need at least one node");
  Topology topo;
  topo.num_nodes = num_nodes;
  topo.neighbors.resize(num_nodes);
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes)
      throw std::invalid_argument("edge endpoint out of range");
    if (a == b) throw std::invalid_argument("self-loops are not allowed");
    auto key = std::minmax(a, b);
    if (!seen.insert(key).second)
      throw std::invalid_argument("duplicate edge");
    topo.neighbors[a].push_back(b);
    topo.neighbors[b].push_back(a);
  }
  for (auto& nb : topo.neighbors) std::sort(nb.begin(), nb.end());
  topo.degree.resize(num_nodes);
  for (int m = 0; m < num_nodes; ++m)
    topo.degree[m] = static_cast<int>(topo.neighbors[m].size());
  topo.num_edges = static_cast<int>(seen.size());
  check_connected(topo);

  fill_weights(topo, false);
  if (!self_weights_admissible(topo)) {
    topo.metropolis_fallback = true;
    topo.warning =
        "adjacency coefficients give a negative self-weight; "
        "using Metropolis weights";
  }
  if (!topo.metropolis_fallback) {
    topo.lambda2 = measure_lambda2(topo);
    if (topo.lambda2 >= 1.0) {
      topo.metropolis_fallback = true;
      topo.warning = "adjacency-coefficient matrix does not contract; "
                     "using Metropolis weights";
    }
  }
  if (topo.metropolis_fallback) {
    std::cerr << "topology: " << topo.warning << "\n";
    fill_weights(topo, true);
    topo.lambda2 = measure_lambda2(topo);
    if (topo.lambda2 >= 1.0)
      throw std::invalid_argument("averaging matrix does not contract");
  }
  return topo;
}

std::vector<Vector> consensus_round(const Topology& topo,
                                    const std::vector<Vector>& values) {
  std::vector<Vector> next(values.size());
  for (int m = 0; m < topo.num_nodes; ++m) {
    Vector x = values[m];
    for (int i : topo.neighbors[m])
      x += topo.zeta(m, i) * (values[i] - values[m]);
    next[m] = std::move(x);
  }
  return next;
}

SumResult global_sum(const Topology& topo, const std::vector<Vector>& locals,
                     const Config& cfg, const RoundObserver& observer) {
  SumResult result = run_average(topo, locals, cfg, observer);
  for (auto& v : result.per_node) v *= static_cast<double>(topo.num_nodes);
  return result;
}

SumResult vector_collect(const Topology& topo,
                         const std::vector<Vector>& contributions, int width,
                         const Config& cfg) {
  if (width % 2 != 0)
    throw std::invalid_argument("collect width must be even");
  const int half = width / 2;
  for (int m = 0; m < topo.num_nodes; ++m) {
    if (contributions[m].size() != width)
      throw std::invalid_argument("contribution width mismatch");
    for (int e = 0; e < width; ++e)
      if (e != m && e != m + half && contributions[m](e) != 0.0)
        throw std::invalid_argument(
            "node contributions must be zero outside own entries");
  }
  SumResult result = run_average(topo, contributions, cfg, {});
  for (auto& v : result.per_node) v *= static_cast<double>(topo.num_nodes);
  return result;
}

Topology load_topology_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open topology file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("topology JSON parse error: ") +
                          e.what());
  }
  if (!j.contains("nodes") || !j.contains("edges"))
    throw DataFormatError("topology JSON needs 'nodes' and 'edges'");
  const int n = j["nodes"].get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2)
      throw DataFormatError("each edge must be a pair");
    edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);  // 1-based file
  }
  return build_topology(edges, n);
}

}  // namespace digmm::consensus
