#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "digmm/consensus.hpp"
#include "digmm/distributed.hpp"
#include "digmm/em.hpp"
#include "digmm/igmm.hpp"
#include "digmm/netsim.hpp"

namespace digmm::io {

using nlohmann::json;

json to_json(const Gmm& gmm);
Gmm gmm_from_json(const json& j);

json to_json(const dist::NodeParams& node);
dist::NodeParams node_from_json(const json& j);

json to_json(const std::vector<dist::NodeParams>& nodes);
std::vector<dist::NodeParams> nodes_from_json(const json& j);

json to_json(const netsim::SimStats& stats);

Gmm load_model(const std::string& path);
void save_json(const std::string& path, const json& j);
json load_json(const std::string& path);

// Run-wide configuration shared by the CLI subcommands. Any field may be
// omitted in the file; defaults below apply.
struct RunConfig {
  std::uint64_t seed = 1;
  std::vector<double> capacities;
  int split_boundary = 0;
  std::string topology_path;
  igmm::Config igmm;       // s_ini <= 0 means "estimate from historical data"
  consensus::Config consensus;
  em::Config em;
  bool stack_phases = false;
  int snapshot_every = 96;
  int grid_points = 2001;
  double grid_halfwidth_sigmas = 6.0;
  double kernel_bandwidth = 0.05;
};

RunConfig run_config_from_json(const json& j);
RunConfig load_run_config(const std::string& path);

// Deterministic per-module seed streams from the single root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag);

}  // namespace digmm::io
