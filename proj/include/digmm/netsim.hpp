#pragma once

#include <cstdint>

#include "digmm/consensus.hpp"

namespace digmm::netsim {

// Round/message accounting for one simulation run. A round of a phase that
// exchanges `width` scalars costs 2 * |edges| * width messages (both
// directions of every edge, one per exchanged quantity).
struct SimStats {
  std::vector<int> rounds_per_consensus;
  std::int64_t messages_total = 0;
  std::vector<double> wall_time_per_update;

  void record_phase(int rounds, int num_edges, int width) {
    rounds_per_consensus.push_back(rounds);
    messages_total += static_cast<std::int64_t>(rounds) * 2 * num_edges * width;
  }
};

enum class PhaseKind { ScalarSum, VectorCollect };

// Executes one consensus phase on the fabric and records its cost.
// ScalarSum: entrywise global sum of the per-node inputs (width = entries).
// VectorCollect: sparse per-node contributions assembled into a full vector.
// Deterministic given (topology, locals, cfg).
std::vector<Vector> run_phase(const consensus::Topology& topo,
                              const std::vector<Vector>& locals,
                              PhaseKind kind, const consensus::Config& cfg,
                              SimStats& stats);

}  // namespace digmm::netsim
