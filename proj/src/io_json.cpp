#include "digmm/io_json.hpp"

#include <fstream>

namespace digmm::io {

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.size();
  if (rows == 0) return Matrix(0, 0);
  const auto cols = j.at(0).size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  return m;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

}  // namespace

json to_json(const Gmm& gmm) {
  json j;
  j["dimension"] = gmm.dimension;
  j["components"] = json::array();
  for (const auto& c : gmm.components) {
    json cj;
    cj["weight"] = c.weight;
    cj["accumulator"] = c.accumulator;
    cj["mean"] = vector_to_json(c.mean);
    cj["covariance"] = matrix_to_json(c.covariance);
    j["components"].push_back(std::move(cj));
  }
  return j;
}

Gmm gmm_from_json(const json& j) {
  Gmm g;
  g.dimension = j.at("dimension").get<int>();
  for (const auto& cj : j.at("components")) {
    GaussianComponent c;
    c.weight = cj.at("weight").get<double>();
    c.accumulator = cj.value("accumulator", 0.0);
    c.mean = vector_from_json(cj.at("mean"));
    c.covariance = matrix_from_json(cj.at("covariance"));
    g.components.push_back(std::move(c));
  }
  g.validate();
  return g;
}

json to_json(const dist::NodeParams& node) {
  json j;
  j["index"] = node.index + 1;  // 1-based in files
  j["weights"] = node.weights;
  j["accumulators"] = node.accumulators;
  j["own_means_x"] = node.mean_x;
  j["own_means_y"] = node.mean_y;
  j["covariances"] = json::array();
  for (const auto& s : node.covariances)
    j["covariances"].push_back(matrix_to_json(s));
  return j;
}

dist::NodeParams node_from_json(const json& j) {
  dist::NodeParams n;
  n.index = j.at("index").get<int>() - 1;
  n.weights = j.at("weights").get<std::vector<double>>();
  n.accumulators = j.at("accumulators").get<std::vector<double>>();
  n.mean_x = j.at("own_means_x").get<std::vector<double>>();
  n.mean_y = j.at("own_means_y").get<std::vector<double>>();
  for (const auto& s : j.at("covariances"))
    n.covariances.push_back(matrix_from_json(s));
  return n;
}

json to_json(const std::vector<dist::NodeParams>& nodes) {
  json j = json::array();
  for (const auto& n : nodes) j.push_back(to_json(n));
  return j;
}

std::vector<dist::NodeParams> nodes_from_json(const json& j) {
  std::vector<dist::NodeParams> nodes;
  for (const auto& nj : j) nodes.push_back(node_from_json(nj));
  return nodes;
}

json to_json(const netsim::SimStats& stats) {
  json j;
  j["messages_total"] = stats.messages_total;
  j["rounds_per_consensus"] = stats.rounds_per_consensus;
  j["wall_time_per_update"] = stats.wall_time_per_update;
  return j;
}

Gmm load_model(const std::string& path) { return gmm_from_json(load_json(path)); }

void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataFormatError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataFormatError("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("capacities"))
    cfg.capacities = j["capacities"].get<std::vector<double>>();
  cfg.split_boundary = j.value("split_boundary", cfg.split_boundary);
  cfg.topology_path = j.value("topology", cfg.topology_path);
  if (j.contains("igmm")) {
    const auto& ij = j["igmm"];
    cfg.igmm.beta = ij.value("beta", cfg.igmm.beta);
    cfg.igmm.s_ini = ij.value("s_ini", 0.0);  // 0 = estimate from data
    cfg.igmm.max_components = ij.value("max_components", 0);
  }
  if (j.contains("consensus")) {
    const auto& cj = j["consensus"];
    cfg.consensus.tolerance = cj.value("tolerance", cfg.consensus.tolerance);
    cfg.consensus.max_rounds = cj.value("max_rounds", cfg.consensus.max_rounds);
    const std::string mode = cj.value("mode", std::string("oracle-stop"));
    if (mode == "oracle-stop")
      cfg.consensus.mode = consensus::Config::Mode::OracleStop;
    else if (mode == "fixed-rounds")
      cfg.consensus.mode = consensus::Config::Mode::FixedRounds;
    else
      throw DataFormatError("unknown consensus mode: " + mode);
  }
  if (j.contains("em")) {
    const auto& ej = j["em"];
    cfg.em.num_components = ej.value("components", cfg.em.num_components);
    cfg.em.max_iterations = ej.value("max_iterations", cfg.em.max_iterations);
    cfg.em.tolerance = ej.value("tolerance", cfg.em.tolerance);
    const std::string init = ej.value("init", std::string("kmeans"));
    if (init == "kmeans")
      cfg.em.init = em::Config::Init::KMeans;
    else if (init == "random-responsibility")
      cfg.em.init = em::Config::Init::RandomResponsibility;
    else
      throw DataFormatError("unknown em init: " + init);
  }
  cfg.stack_phases = j.value("stack_phases", cfg.stack_phases);
  cfg.snapshot_every = j.value("snapshot_every", cfg.snapshot_every);
  cfg.grid_points = j.value("grid_points", cfg.grid_points);
  cfg.grid_halfwidth_sigmas =
      j.value("grid_halfwidth_sigmas", cfg.grid_halfwidth_sigmas);
  cfg.kernel_bandwidth = j.value("kernel_bandwidth", cfg.kernel_bandwidth);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(load_json(path));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the tag
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::uint64_t z = root ^ h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace digmm::io
