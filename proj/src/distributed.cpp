#include "digmm/distributed.hpp"

#include <cmath>

namespace digmm::dist {

namespace {

Matrix inverse_of(const Matrix& covariance) {
  auto llt = cholesky_with_jitter(covariance);
  return llt.solve(Matrix::Identity(covariance.rows(), covariance.cols()));
}

double log_det_of(const Matrix& covariance) {
  auto llt = cholesky_with_jitter(covariance);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void check_shapes(const std::vector<NodeParams>& nodes,
                  const std::vector<Observation>& obs) {
  const int m_count = static_cast<int>(nodes.size());
  if (m_count == 0) throw std::invalid_argument("no nodes");
  if (static_cast<int>(obs.size()) != m_count)
    throw std::invalid_argument("one observation per node required");
  const int j_count = nodes.front().size();
  for (const auto& n : nodes)
    if (n.size() != j_count)
      throw InvalidModel("nodes disagree on component count");
}

// Runs the per-entry global sums of one component either as sequential
// scalar phases (the literal protocol) or as one stacked vector phase.
// Returns each node's converged copy of the summed vector.
std::vector<Vector> summed_vectors(const consensus::Topology& topo,
                                   const std::vector<Vector>& locals,
                                   const SchemeConfig& cfg,
                                   netsim::SimStats& stats) {
  const int m_count = topo.num_nodes;
  const int width = static_cast<int>(locals.front().size());
  if (cfg.stack_phases)
    return netsim::run_phase(topo, locals, netsim::PhaseKind::ScalarSum,
                             cfg.consensus, stats);
  std::vector<Vector> per_node(m_count, Vector(width));
  std::vector<Vector> entry(m_count, Vector(1));
  for (int e = 0; e < width; ++e) {
    for (int m = 0; m < m_count; ++m) entry[m](0) = locals[m](e);
    auto sums = netsim::run_phase(topo, entry, netsim::PhaseKind::ScalarSum,
                                  cfg.consensus, stats);
    for (int m = 0; m < m_count; ++m) per_node[m](e) = sums[m](0);
  }
  return per_node;
}

}  // namespace

Vector local_judge_layer1(const NodeParams& node, int j,
                          const Observation& obs, int num_participants) {
  const int m = node.index;
  const Matrix inv = inverse_of(node.covariances[j]);
  const double xi_x = obs.power - node.mean_x[j];
  const double xi_y = obs.forecast - node.mean_y[j];
  return xi_x * inv.row(m).transpose() +
         xi_y * inv.row(num_participants + m).transpose();
}

double local_judge_layer2(const NodeParams& node, int j,
                          const Observation& obs, double g_x, double g_y) {
  return g_x * (obs.power - node.mean_x[j]) +
         g_y * (obs.forecast - node.mean_y[j]);
}

UpdatePieces local_update_pieces(const NodeParams& node, int j,
                                 const Observation& obs, double r) {
  UpdatePieces pieces;
  pieces.epsilon = r * (1.0 + r * r - 3.0 * r);
  pieces.xi_x = obs.power - node.mean_x[j];
  pieces.xi_y = obs.forecast - node.mean_y[j];
  return pieces;
}

Vector local_derive_rho(const NodeParams& node, int j, double y0_m,
                        int num_participants) {
  const int m = node.index;
  const Matrix c_inv = inverse_of(node.covariances[j].bottomRightCorner(
      num_participants, num_participants));
  return (y0_m - node.mean_y[j]) * c_inv.row(m).transpose();
}

double local_derive_phi(const NodeParams& node, int j, double y0_m,
                        double theta_m) {
  return theta_m * (y0_m - node.mean_y[j]);
}

JudgeResult distributed_judge(const std::vector<NodeParams>& nodes,
                              const consensus::Topology& topo,
                              const std::vector<Observation>& obs,
                              const SchemeConfig& cfg,
                              netsim::SimStats& stats) {
  check_shapes(nodes, obs);
  const int m_count = static_cast<int>(nodes.size());
  const int j_count = nodes.front().size();
  const double threshold =
      igmm::chi2_quantile(2 * m_count, 1.0 - cfg.igmm.beta);

  JudgeResult result;
  result.d_squared.assign(m_count, std::vector<double>(j_count, 0.0));

  std::vector<Vector> layer1(m_count);
  std::vector<Vector> layer2(m_count, Vector(1));
  for (int j = 0; j < j_count; ++j) {
    for (int m = 0; m < m_count; ++m)
      layer1[m] = local_judge_layer1(nodes[m], j, obs[m], m_count);
    auto g = summed_vectors(topo, layer1, cfg, stats);
    for (int m = 0; m < m_count; ++m)
      layer2[m](0) = local_judge_layer2(nodes[m], j, obs[m], g[m](m),
                                        g[m](m_count + m));
    auto d2 = netsim::run_phase(topo, layer2, netsim::PhaseKind::ScalarSum,
                                cfg.consensus, stats);
    for (int m = 0; m < m_count; ++m) result.d_squared[m][j] = d2[m](0);
  }

  result.accepted.resize(m_count);
  for (int m = 0; m < m_count; ++m) {
    bool ok = false;
    for (int j = 0; j < j_count; ++j)
      if (result.d_squared[m][j] <= threshold) ok = true;
    result.accepted[m] = ok ? 1 : 0;
  }
  return result;
}

void distributed_update(std::vector<NodeParams>& nodes,
                        const consensus::Topology& topo,
                        const std::vector<std::vector<double>>& d_squared,
                        const std::vector<Observation>& obs,
                        const SchemeConfig& cfg, netsim::SimStats& stats) {
  check_shapes(nodes, obs);
  const int m_count = static_cast<int>(nodes.size());
  const int j_count = nodes.front().size();

  // Posteriors, accumulators and gains are pure functions of the shared
  // distances and shared old parameters; every node evaluates them
  // redundantly instead of broadcasting.
  std::vector<Vector> post(m_count);
  for (int m = 0; m < m_count; ++m) {
    std::vector<double> lw(j_count), ld(j_count);
    for (int j = 0; j < j_count; ++j) {
      lw[j] = std::log(nodes[m].weights[j]);
      ld[j] = log_det_of(nodes[m].covariances[j]);
    }
    post[m] = posterior_from_distances(lw, d_squared[m], ld);
  }

  std::vector<Vector> contrib(m_count, Vector::Zero(2 * m_count));
  for (int j = 0; j < j_count; ++j) {
    for (int m = 0; m < m_count; ++m) {
      const double r =
          post[m](j) / (nodes[m].accumulators[j] + post[m](j));
      const auto pieces = local_update_pieces(nodes[m], j, obs[m], r);
      contrib[m].setZero();
      contrib[m](m) = pieces.xi_x;
      contrib[m](m_count + m) = pieces.xi_y;
    }
    auto xi = netsim::run_phase(topo, contrib, netsim::PhaseKind::VectorCollect,
                                cfg.consensus, stats);
    for (int m = 0; m < m_count; ++m) {
      auto& node = nodes[m];
      const double p = post[m](j);
      const double r = p / (node.accumulators[j] + p);
      const double epsilon = r * (1.0 + r * r - 3.0 * r);
      node.covariances[j] = (1.0 - r) * node.covariances[j] +
                            epsilon * (xi[m] * xi[m].transpose());
      node.mean_x[j] += r * (obs[m].power - node.mean_x[j]);
      node.mean_y[j] += r * (obs[m].forecast - node.mean_y[j]);
    }
  }
  for (int m = 0; m < m_count; ++m) {
    auto& node = nodes[m];
    double h_total = 0.0;
    for (int j = 0; j < j_count; ++j) {
      node.accumulators[j] += post[m](j);
      h_total += node.accumulators[j];
    }
    for (int j = 0; j < j_count; ++j)
      node.weights[j] = node.accumulators[j] / h_total;
  }
}

void distributed_create(std::vector<NodeParams>& nodes,
                        const std::vector<Observation>& obs,
                        const SchemeConfig& cfg) {
  check_shapes(nodes, obs);
  const int m_count = static_cast<int>(nodes.size());
  const Matrix preset = igmm::initial_covariance(cfg.igmm, 2 * m_count);
  for (int m = 0; m < m_count; ++m) {
    auto& node = nodes[m];
    if (cfg.igmm.max_components > 0 &&
        node.size() >= cfg.igmm.max_components) {
      if (cfg.igmm.on_capacity == igmm::Config::OnCapacity::Error)
        throw CapacityExceeded("component cap reached");
      // Shared accumulators: every node removes the same index.
      int least = 0;
      for (int j = 1; j < node.size(); ++j)
        if (node.accumulators[j] < node.accumulators[least]) least = j;
      node.weights.erase(node.weights.begin() + least);
      node.accumulators.erase(node.accumulators.begin() + least);
      node.mean_x.erase(node.mean_x.begin() + least);
      node.mean_y.erase(node.mean_y.begin() + least);
      node.covariances.erase(node.covariances.begin() + least);
    }
    node.accumulators.push_back(1.0);
    node.mean_x.push_back(obs[m].power);
    node.mean_y.push_back(obs[m].forecast);
    node.covariances.push_back(preset);
    double h_total = 0.0;
    for (double h : node.accumulators) h_total += h;
    node.weights.resize(node.accumulators.size());
    for (int j = 0; j < node.size(); ++j)
      node.weights[j] = node.accumulators[j] / h_total;
  }
}

std::vector<NodeConditional> distributed_derive(
    const std::vector<NodeParams>& nodes, const consensus::Topology& topo,
    const std::vector<double>& y0, const SchemeConfig& cfg,
    netsim::SimStats& stats) {
  const int m_count = static_cast<int>(nodes.size());
  if (static_cast<int>(y0.size()) != m_count)
    throw std::invalid_argument("one forecast per node required");
  const int j_count = nodes.front().size();

  // Per node: converged theta copy and forecast-block distance, per component.
  std::vector<std::vector<Vector>> theta(m_count,
                                         std::vector<Vector>(j_count));
  std::vector<std::vector<double>> d2y(m_count,
                                       std::vector<double>(j_count, 0.0));
  std::vector<Vector> rho(m_count);
  std::vector<Vector> phi(m_count, Vector(1));
  for (int j = 0; j < j_count; ++j) {
    for (int m = 0; m < m_count; ++m)
      rho[m] = local_derive_rho(nodes[m], j, y0[m], m_count);
    auto t = summed_vectors(topo, rho, cfg, stats);
    for (int m = 0; m < m_count; ++m) {
      theta[m][j] = t[m];
      phi[m](0) = local_derive_phi(nodes[m], j, y0[m], t[m](m));
    }
    auto d2 = netsim::run_phase(topo, phi, netsim::PhaseKind::ScalarSum,
                                cfg.consensus, stats);
    for (int m = 0; m < m_count; ++m) d2y[m][j] = d2[m](0);
  }

  std::vector<NodeConditional> out(m_count);
  for (int m = 0; m < m_count; ++m) {
    const auto& node = nodes[m];
    std::vector<double> log_alpha(j_count);
    for (int j = 0; j < j_count; ++j) {
      const Matrix c_block =
          node.covariances[j].bottomRightCorner(m_count, m_count);
      log_alpha[j] = std::log(node.weights[j]) - 0.5 * d2y[m][j] -
                     0.5 * log_det_of(c_block);
    }
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : log_alpha) mx = std::max(mx, v);
    double lse = 0.0;
    for (double v : log_alpha) lse += std::exp(v - mx);
    lse = mx + std::log(lse);

    out[m].y0 = y0[m];
    out[m].components.resize(j_count);
    for (int j = 0; j < j_count; ++j) {
      const Matrix& sigma = node.covariances[j];
      const Vector b = sigma.row(m).tail(m_count);
      const Matrix c_inv =
          inverse_of(sigma.bottomRightCorner(m_count, m_count));
      ConditionalParams p;
      p.alpha = std::isfinite(lse) ? std::exp(log_alpha[j] - lse)
                                   : 1.0 / j_count;
      p.lambda = node.mean_x[j] + b.dot(theta[m][j]);
      p.delta = sigma(m, m) - b.dot(c_inv * b);
      out[m].components[j] = p;
    }
  }
  return out;
}

StepResult scheme_step(std::vector<NodeParams>& nodes,
                       const consensus::Topology& topo,
                       const std::vector<Observation>& obs,
                       const std::vector<double>& y0, const SchemeConfig& cfg,
                       netsim::SimStats& stats) {
  auto judged = distributed_judge(nodes, topo, obs, cfg, stats);
  for (char a : judged.accepted)
    if (a != judged.accepted.front())
      throw std::logic_error("nodes disagree on the judgment");

  StepResult result;
  if (judged.accepted.front()) {
    result.kind = igmm::StepKind::Updated;
    distributed_update(nodes, topo, judged.d_squared, obs, cfg, stats);
  } else {
    result.kind = igmm::StepKind::Created;
    distributed_create(nodes, obs, cfg);
  }
  result.conditionals = distributed_derive(nodes, topo, y0, cfg, stats);
  return result;
}

std::vector<NodeParams> make_nodes(const Gmm& joint) {
  joint.validate();
  const int m_count = joint.num_participants();
  if (joint.dimension != 2 * m_count)
    throw InvalidModel("joint model dimension must be even");
  for (const auto& c : joint.components)
    if (!(c.accumulator > 0.0))
      throw InvalidModel("bootstrap accumulators before splitting");

  std::vector<NodeParams> nodes(m_count);
  for (int m = 0; m < m_count; ++m) {
    auto& node = nodes[m];
    node.index = m;
    for (const auto& c : joint.components) {
      node.weights.push_back(c.weight);
      node.accumulators.push_back(c.accumulator);
      node.mean_x.push_back(c.mean(m));
      node.mean_y.push_back(c.mean(m_count + m));
      node.covariances.push_back(c.covariance);
    }
  }
  return nodes;
}

Gmm reassemble_for_verification(const std::vector<NodeParams>& nodes, int k) {
  const int m_count = static_cast<int>(nodes.size());
  const auto& holder = nodes.at(k);
  Gmm out;
  out.dimension = 2 * m_count;
  for (int j = 0; j < holder.size(); ++j) {
    GaussianComponent c;
    c.weight = holder.weights[j];
    c.accumulator = holder.accumulators[j];
    c.covariance = holder.covariances[j];
    c.mean = Vector(2 * m_count);
    for (int m = 0; m < m_count; ++m) {
      c.mean(m) = nodes[m].mean_x[j];
      c.mean(m_count + m) = nodes[m].mean_y[j];
    }
    out.components.push_back(std::move(c));
  }
  return out;
}

}  // namespace digmm::dist
