#include "digmm/netsim.hpp"

namespace digmm::netsim {

std::vector<Vector> run_phase(const consensus::Topology& topo,
                              const std::vector<Vector>& locals,
                              PhaseKind kind, const consensus::Config& cfg,
                              SimStats& stats) {
  if (locals.empty()) throw std::invalid_argument("no per-node inputs");
  const int width = static_cast<int>(locals.front().size());
  consensus::SumResult result;
  switch (kind) {
    case PhaseKind::ScalarSum:
      result = consensus::global_sum(topo, locals, cfg);
      break;
    case PhaseKind::VectorCollect:
      result = consensus::vector_collect(topo, locals, width, cfg);
      break;
  }
  stats.record_phase(result.rounds, topo.num_edges, width);
  return std::move(result.per_node);
}

}  // namespace digmm::netsim
