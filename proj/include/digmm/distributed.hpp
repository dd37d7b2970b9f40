#pragma once

#include <vector>

#include "digmm/igmm.hpp"
#include "digmm/netsim.hpp"

namespace digmm::dist {

// One participant's private slice of the mixture parameters: the shared
// weights, accumulators and full covariances plus only its own mean entries.
// A node never stores another participant's mean.
struct NodeParams {
  int index = 0;  // 0-based node id
  std::vector<double> weights;
  std::vector<double> accumulators;
  std::vector<double> mean_x;  // mu_{j,x_m} for this node's m
  std::vector<double> mean_y;  // mu_{j,y_m}
  std::vector<Matrix> covariances;

  int size() const { return static_cast<int>(weights.size()); }
};

// One participant's new data point: its own power and forecast.
struct Observation {
  double power = 0.0;
  double forecast = 0.0;
};

// The conditional forecast-error parameters a node ends up holding.
struct NodeConditional {
  double y0 = 0.0;  // the node's own conditioning forecast
  std::vector<ConditionalParams> components;
};

struct SchemeConfig {
  igmm::Config igmm;
  consensus::Config consensus;
  // Batch the per-entry global sums of one component into a single vector
  // phase instead of sequential scalar phases.
  bool stack_phases = false;
};

// ---- node-local computations (no access to the other nodes' state) ----

// First judging layer: this node's additive contribution (all 2M entries)
// to the distance decomposition of component j, built from the rows of the
// node's own inverse covariance and its own innovations.
Vector local_judge_layer1(const NodeParams& node, int j,
                          const Observation& obs, int num_participants);

// Second judging layer: combines the delivered sums for this node's own
// entries with its own innovations.
double local_judge_layer2(const NodeParams& node, int j,
                          const Observation& obs, double g_x, double g_y);

// Covariance-update pieces: the scalar gain term and this node's own
// innovation entries (against the pre-update means).
struct UpdatePieces {
  double epsilon = 0.0;  // r (1 + r^2 - 3r)
  double xi_x = 0.0;
  double xi_y = 0.0;
};
UpdatePieces local_update_pieces(const NodeParams& node, int j,
                                 const Observation& obs, double r);

// Derivation, first local layer: this node's row contribution to
// C_j^{-1} (y0 - mu_y), one entry per participant.
Vector local_derive_rho(const NodeParams& node, int j, double y0_m,
                        int num_participants);

// Derivation, second local layer: theta entry for this node combined with
// its own forecast innovation.
double local_derive_phi(const NodeParams& node, int j, double y0_m,
                        double theta_m);

// ---- consensus-composed operations ----

struct JudgeResult {
  std::vector<char> accepted;                 // per node; must be coherent
  std::vector<std::vector<double>> d_squared; // [node][component]
};

JudgeResult distributed_judge(const std::vector<NodeParams>& nodes,
                              const consensus::Topology& topo,
                              const std::vector<Observation>& obs,
                              const SchemeConfig& cfg, netsim::SimStats& stats);

// Robbins-Monro update at every node: posteriors, accumulators, gains and
// weights are recomputed locally from the shared distances; only the
// innovation vector crosses the network (vector-collect per component).
void distributed_update(std::vector<NodeParams>& nodes,
                        const consensus::Topology& topo,
                        const std::vector<std::vector<double>>& d_squared,
                        const std::vector<Observation>& obs,
                        const SchemeConfig& cfg, netsim::SimStats& stats);

// Component creation is communication-free: every node appends the preset
// covariance, unit accumulator and its own mean entries.
void distributed_create(std::vector<NodeParams>& nodes,
                        const std::vector<Observation>& obs,
                        const SchemeConfig& cfg);

std::vector<NodeConditional> distributed_derive(
    const std::vector<NodeParams>& nodes, const consensus::Topology& topo,
    const std::vector<double>& y0, const SchemeConfig& cfg,
    netsim::SimStats& stats);

struct StepResult {
  igmm::StepKind kind = igmm::StepKind::Updated;
  std::vector<NodeConditional> conditionals;
};

// Full scheme step: judge, update-or-create, then derive.
StepResult scheme_step(std::vector<NodeParams>& nodes,
                       const consensus::Topology& topo,
                       const std::vector<Observation>& obs,
                       const std::vector<double>& y0, const SchemeConfig& cfg,
                       netsim::SimStats& stats);

// Splits a bootstrapped joint model (accumulators set) into per-node state.
std::vector<NodeParams> make_nodes(const Gmm& joint);

// Verification path only: collects every node's private mean entries to
// rebuild the joint mixture node `k` believes in. Not part of the protocol.
Gmm reassemble_for_verification(const std::vector<NodeParams>& nodes, int k);

}  // namespace digmm::dist
