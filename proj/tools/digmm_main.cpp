// digmm: distributed incremental Gaussian-mixture updates for wind power
// forecast error. Subcommands expose each pipeline stage; everything is a
// deterministic function of (inputs, config, seed).

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "digmm/dataio.hpp"
#include "digmm/distributed.hpp"
#include "digmm/em.hpp"
#include "digmm/io_json.hpp"
#include "digmm/metrics.hpp"

namespace fs = std::filesystem;
using namespace digmm;
using io::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "run configuration JSON");
  cmd->add_option("--out-dir", args->out_dir, "output directory");
  cmd->add_option("--seed", args->seed, "root seed override")
      ->each([args](const std::string&) { args->seed_given = true; });
}

io::RunConfig resolve_config(const CommonArgs& args) {
  io::RunConfig cfg;
  if (!args.config_path.empty()) cfg = io::load_run_config(args.config_path);
  if (args.seed_given) cfg.seed = args.seed;
  return cfg;
}

fs::path out_path(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  return fs::path(args.out_dir) / name;
}

int count_sites(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw DataFormatError("cannot open data file: " + csv_path);
  std::string header;
  std::getline(in, header);
  const auto commas = std::count(header.begin(), header.end(), ',');
  if (commas < 2 || commas % 2 != 0)
    throw DataFormatError("header does not match the expected schema");
  return static_cast<int>(commas / 2);
}

dataio::Dataset load_data(const std::string& path, io::RunConfig& cfg) {
  const int m = count_sites(path);
  if (cfg.capacities.empty()) cfg.capacities.assign(m, 1.0);
  if (static_cast<int>(cfg.capacities.size()) != m)
    throw DataFormatError("config capacities do not match the data columns");
  dataio::LoadReport report;
  auto data = dataio::load_csv(path, cfg.capacities, &report);
  if (report.rows_dropped > 0)
    std::cerr << "load: dropped " << report.rows_dropped
              << " rows with missing or out-of-range values\n";
  return data;
}

// The update stream: rows after the split boundary when one is set,
// otherwise the whole file.
Matrix update_stream(const dataio::Dataset& data, const io::RunConfig& cfg) {
  if (cfg.split_boundary > 0) {
    auto [hist, fresh] = dataio::split(data, cfg.split_boundary);
    return fresh.joint();
  }
  return data.joint();
}

igmm::Config resolve_igmm(const io::RunConfig& cfg, const json& model_json,
                          const Matrix& stream) {
  igmm::Config icfg = cfg.igmm;
  if (!(icfg.s_ini > 0.0)) {
    if (model_json.contains("s_ini_estimate"))
      icfg.s_ini = model_json["s_ini_estimate"].get<double>();
    else
      icfg.s_ini = igmm::s_ini_from_data(stream);
  }
  return icfg;
}

std::vector<dist::Observation> row_to_obs(const Vector& u, int m_count) {
  std::vector<dist::Observation> obs(m_count);
  for (int m = 0; m < m_count; ++m) obs[m] = {u(m), u(m_count + m)};
  return obs;
}

Vector derive_grid(const std::vector<ConditionalParams>& params, double y0,
                   int points, double halfwidth_sigmas) {
  double lo = 1e300, hi = -1e300;
  for (const auto& p : params) {
    const double sd = std::sqrt(p.delta);
    lo = std::min(lo, p.lambda - y0 - halfwidth_sigmas * sd);
    hi = std::max(hi, p.lambda - y0 + halfwidth_sigmas * sd);
  }
  return Vector::LinSpaced(points, lo, hi);
}

void write_curves(const CommonArgs& args, const std::string& stem,
                  const std::vector<std::vector<ConditionalParams>>& cond,
                  const Vector& y0, const io::RunConfig& cfg) {
  std::ofstream all(out_path(args, stem + "_curves.csv"));
  all << "site,z,pdf,cdf\n" << std::setprecision(17);
  for (std::size_t m = 0; m < cond.size(); ++m) {
    Gmm z_mix = conditional_to_gmm1d(cond[m], y0(m));
    Vector grid = derive_grid(cond[m], y0(m), cfg.grid_points,
                              cfg.grid_halfwidth_sigmas);
    Vector pdf = pdf_1d(z_mix, grid);
    Vector cdf = cdf_1d(z_mix, grid);
    std::ofstream per_pdf(
        out_path(args, stem + "_site" + std::to_string(m + 1) + "_pdf.csv"));
    std::ofstream per_cdf(
        out_path(args, stem + "_site" + std::to_string(m + 1) + "_cdf.csv"));
    per_pdf << "grid,value\n" << std::setprecision(17);
    per_cdf << "grid,value\n" << std::setprecision(17);
    for (int i = 0; i < cfg.grid_points; ++i) {
      all << m + 1 << ',' << grid(i) << ',' << pdf(i) << ',' << cdf(i) << "\n";
      per_pdf << grid(i) << ',' << pdf(i) << "\n";
      per_cdf << grid(i) << ',' << cdf(i) << "\n";
    }
  }
}

json conditional_params_json(
    const std::vector<std::vector<ConditionalParams>>& cond, const Vector& y0) {
  json out = json::array();
  for (std::size_t m = 0; m < cond.size(); ++m) {
    json site;
    site["site"] = m + 1;
    site["y0"] = y0(static_cast<Eigen::Index>(m));
    site["components"] = json::array();
    for (const auto& p : cond[m])
      site["components"].push_back(
          {{"alpha", p.alpha}, {"lambda", p.lambda}, {"delta", p.delta}});
    out.push_back(std::move(site));
  }
  return out;
}

Vector parse_y0(const std::string& text, int m_count) {
  std::vector<double> values;
  std::string cur;
  std::stringstream ss(text);
  while (std::getline(ss, cur, ',')) values.push_back(std::stod(cur));
  if (static_cast<int>(values.size()) != m_count)
    throw std::invalid_argument("y0 must have one value per site");
  Vector y0(m_count);
  for (int m = 0; m < m_count; ++m) y0(m) = values[m];
  return y0;
}

// ---- subcommand bodies ----

int cmd_synth(const CommonArgs& args, const std::string& truth_path, int n,
              const std::string& out_file) {
  io::RunConfig cfg = resolve_config(args);
  Gmm truth = io::load_model(truth_path);
  auto data =
      dataio::synth_from_gmm(truth, n, io::derive_seed(cfg.seed, "synth"));
  std::vector<double> caps = cfg.capacities;
  if (caps.empty()) caps.assign(truth.num_participants(), 1.0);
  dataio::write_csv(out_file, data, caps);
  std::cout << "wrote " << out_file << " (" << n << " rows, "
            << truth.num_participants() << " sites)\n";
  return 0;
}

int cmd_fit_em(const CommonArgs& args, const std::string& data_path, int rows,
               int components) {
  io::RunConfig cfg = resolve_config(args);
  auto data = load_data(data_path, cfg);
  Matrix train = data.joint();
  if (rows > 0 && rows < train.rows()) train = train.topRows(rows);

  em::Config ecfg = cfg.em;
  if (components > 0) ecfg.num_components = components;
  ecfg.seed = io::derive_seed(cfg.seed, "em");
  auto fitted = em::fit(train, ecfg);
  bootstrap_accumulators(fitted.model, static_cast<double>(train.rows()));

  json model_json = io::to_json(fitted.model);
  model_json["s_ini_estimate"] = igmm::s_ini_from_data(train);
  io::save_json(out_path(args, "model.json").string(), model_json);

  std::ofstream trace(out_path(args, "likelihood_trace.csv"));
  trace << "iteration,log_likelihood\n" << std::setprecision(17);
  for (std::size_t i = 0; i < fitted.log_likelihood_trace.size(); ++i)
    trace << i << ',' << fitted.log_likelihood_trace[i] << "\n";

  std::cout << "fit " << ecfg.num_components << " components on "
            << train.rows() << " rows in " << fitted.iterations
            << " iterations\n";
  return 0;
}

int cmd_run_centralized(const CommonArgs& args, const std::string& model_path,
                        const std::string& data_path, int snapshot_every) {
  io::RunConfig cfg = resolve_config(args);
  json model_json = io::load_json(model_path);
  Gmm model = io::gmm_from_json(model_json);
  auto data = load_data(data_path, cfg);
  Matrix stream = update_stream(data, cfg);
  igmm::Config icfg = resolve_igmm(cfg, model_json, stream);
  const int every = snapshot_every > 0 ? snapshot_every : cfg.snapshot_every;

  std::ofstream log(out_path(args, "step_log.csv"));
  log << "index,kind,components,min_d_squared\n" << std::setprecision(17);
  for (Eigen::Index t = 0; t < stream.rows(); ++t) {
    auto [next, outcome] = igmm::step(model, stream.row(t).transpose(), icfg);
    model = std::move(next);
    double min_d2 = std::numeric_limits<double>::infinity();
    for (double d : outcome.d_squared) min_d2 = std::min(min_d2, d);
    log << t << ','
        << (outcome.kind == igmm::StepKind::Updated ? "updated" : "created")
        << ',' << model.size() << ',' << min_d2 << "\n";
    if ((t + 1) % every == 0) {
      json snap = io::to_json(model);
      snap["after_updates"] = t + 1;
      io::save_json(
          out_path(args, "model_after_" + std::to_string(t + 1) + ".json")
              .string(),
          snap);
    }
  }
  io::save_json(out_path(args, "model_updated.json").string(),
                io::to_json(model));
  std::cout << "applied " << stream.rows() << " updates; final J = "
            << model.size() << "\n";
  return 0;
}

int cmd_run_distributed(const CommonArgs& args, const std::string& model_path,
                        const std::string& data_path,
                        const std::string& topology_path, int snapshot_every,
                        const std::string& y0_text) {
  io::RunConfig cfg = resolve_config(args);
  json model_json = io::load_json(model_path);
  Gmm model = io::gmm_from_json(model_json);
  auto data = load_data(data_path, cfg);
  Matrix stream = update_stream(data, cfg);

  const std::string topo_path =
      !topology_path.empty() ? topology_path : cfg.topology_path;
  if (topo_path.empty())
    throw std::invalid_argument("a topology file is required");
  auto topo = consensus::load_topology_json(topo_path);
  const int m_count = model.num_participants();
  if (topo.num_nodes != m_count)
    throw std::invalid_argument("topology node count must match the sites");

  dist::SchemeConfig scfg;
  scfg.igmm = resolve_igmm(cfg, model_json, stream);
  scfg.consensus = cfg.consensus;
  scfg.stack_phases = cfg.stack_phases;
  const int every = snapshot_every > 0 ? snapshot_every : cfg.snapshot_every;

  auto nodes = dist::make_nodes(model);
  netsim::SimStats stats;
  for (Eigen::Index t = 0; t < stream.rows(); ++t) {
    const auto start = std::chrono::steady_clock::now();
    Vector u = stream.row(t).transpose();
    auto obs = row_to_obs(u, m_count);
    auto judged = dist::distributed_judge(nodes, topo, obs, scfg, stats);
    if (judged.accepted[0])
      dist::distributed_update(nodes, topo, judged.d_squared, obs, scfg, stats);
    else
      dist::distributed_create(nodes, obs, scfg);
    stats.wall_time_per_update.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count());
    if ((t + 1) % every == 0)
      io::save_json(
          out_path(args, "nodes_after_" + std::to_string(t + 1) + ".json")
              .string(),
          io::to_json(nodes));
  }

  // final conditional derivation at the requested (or latest) forecasts
  Vector y0;
  if (!y0_text.empty())
    y0 = parse_y0(y0_text, m_count);
  else if (stream.rows() > 0)
    y0 = stream.row(stream.rows() - 1).tail(m_count).transpose();
  else
    throw std::invalid_argument("empty update stream and no --y0 given");
  std::vector<double> y0_own(y0.data(), y0.data() + m_count);
  auto conditionals = dist::distributed_derive(nodes, topo, y0_own, scfg, stats);

  io::save_json(out_path(args, "nodes_final.json").string(),
                io::to_json(nodes));
  io::save_json(out_path(args, "sim_stats.json").string(), io::to_json(stats));
  std::vector<std::vector<ConditionalParams>> cond(m_count);
  for (int m = 0; m < m_count; ++m) cond[m] = conditionals[m].components;
  io::save_json(out_path(args, "conditionals.json").string(),
                conditional_params_json(cond, y0));
  write_curves(args, "conditional", cond, y0, cfg);

  std::cout << "applied " << stream.rows() << " distributed updates on "
            << m_count << " nodes; final J = " << nodes[0].size()
            << "; messages = " << stats.messages_total << "\n";
  return 0;
}

int cmd_derive(const CommonArgs& args, const std::string& model_path,
               const std::string& snapshots_path,
               const std::string& topology_path, const std::string& y0_text) {
  io::RunConfig cfg = resolve_config(args);
  if (model_path.empty() == snapshots_path.empty())
    throw std::invalid_argument("pass exactly one of --model / --snapshots");

  if (!model_path.empty()) {
    Gmm model = io::load_model(model_path);
    const int m_count = model.num_participants();
    Vector y0 = parse_y0(y0_text, m_count);
    auto cond = condition_centralized(model, y0);
    io::save_json(out_path(args, "conditionals.json").string(),
                  conditional_params_json(cond, y0));
    write_curves(args, "conditional", cond, y0, cfg);
    std::cout << "derived conditionals for " << m_count << " sites\n";
    return 0;
  }

  auto nodes = io::nodes_from_json(io::load_json(snapshots_path));
  const std::string topo_path =
      !topology_path.empty() ? topology_path : cfg.topology_path;
  if (topo_path.empty())
    throw std::invalid_argument("a topology file is required");
  auto topo = consensus::load_topology_json(topo_path);
  const int m_count = static_cast<int>(nodes.size());
  Vector y0 = parse_y0(y0_text, m_count);

  dist::SchemeConfig scfg;
  scfg.consensus = cfg.consensus;
  scfg.stack_phases = cfg.stack_phases;
  netsim::SimStats stats;
  std::vector<double> y0_own(y0.data(), y0.data() + m_count);
  auto conditionals = dist::distributed_derive(nodes, topo, y0_own, scfg, stats);
  std::vector<std::vector<ConditionalParams>> cond(m_count);
  for (int m = 0; m < m_count; ++m) cond[m] = conditionals[m].components;
  io::save_json(out_path(args, "conditionals.json").string(),
                conditional_params_json(cond, y0));
  io::save_json(out_path(args, "sim_stats.json").string(), io::to_json(stats));
  write_curves(args, "conditional", cond, y0, cfg);
  std::cout << "derived distributed conditionals for " << m_count
            << " nodes\n";
  return 0;
}

Gmm load_comparable(const std::string& path, int node) {
  json j = io::load_json(path);
  if (j.is_array()) {  // node snapshots: reassemble the chosen node's view
    auto nodes = io::nodes_from_json(j);
    return dist::reassemble_for_verification(nodes, node);
  }
  return io::gmm_from_json(j);
}

Vector load_curve(const std::string& path, Vector* grid_out) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open curve file: " + path);
  std::string line;
  std::getline(in, line);
  if (line != "grid,value")
    throw DataFormatError("curve files need a grid,value header");
  std::vector<double> grid, value;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    grid.push_back(std::stod(line.substr(0, comma)));
    value.push_back(std::stod(line.substr(comma + 1)));
  }
  Vector g(grid.size()), v(value.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    g(i) = grid[i];
    v(i) = value[i];
  }
  if (grid_out) *grid_out = g;
  return v;
}

int cmd_compare(const CommonArgs& args, const std::string& a_path,
                const std::string& b_path, const std::string& metric,
                int marginal_dim, int node, int samples) {
  io::RunConfig cfg = resolve_config(args);
  json result;
  result["metric"] = metric;
  result["a"] = a_path;
  result["b"] = b_path;

  if (metric == "js") {
    Gmm a = load_comparable(a_path, node);
    Gmm b = load_comparable(b_path, node);
    double value;
    if (marginal_dim >= 0) {
      Gmm am = marginal(a, {marginal_dim});
      Gmm bm = marginal(b, {marginal_dim});
      value = metrics::js_divergence(am, bm, metrics::JsMethod::Grid1d,
                                     cfg.grid_points);
      result["method"] = "grid-1d";
      result["marginal_dimension"] = marginal_dim;
    } else {
      value = metrics::js_divergence(a, b, metrics::JsMethod::MonteCarlo,
                                     samples,
                                     io::derive_seed(cfg.seed, "js-mc"));
      result["method"] = "monte-carlo";
      result["samples"] = samples;
    }
    result["value"] = value;
  } else if (metric == "rse") {
    Vector grid_a, grid_b;
    Vector a = load_curve(a_path, &grid_a);
    Vector b = load_curve(b_path, &grid_b);
    if (grid_a.size() != grid_b.size() ||
        (grid_a - grid_b).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("curves are not on the same grid");
    result["value"] = metrics::rse(a, b);
    result["unit"] = "percent";
  } else {
    throw std::invalid_argument("unknown metric: " + metric);
  }

  io::save_json(out_path(args, "metrics.json").string(), result);
  std::cout << result.dump(2) << "\n";
  return 0;
}

int cmd_bench(const CommonArgs& args, const std::string& data_path,
              int em_stride, int max_updates) {
  io::RunConfig cfg = resolve_config(args);
  auto data = load_data(data_path, cfg);
  const int boundary =
      cfg.split_boundary > 0 ? cfg.split_boundary : data.rows() / 2;
  auto [hist, fresh] = dataio::split(data, boundary);
  Matrix history = hist.joint();
  Matrix stream = fresh.joint();
  if (max_updates > 0 && max_updates < stream.rows())
    stream = stream.topRows(max_updates);

  // incremental path: one model update per point
  em::Config ecfg = cfg.em;
  ecfg.seed = io::derive_seed(cfg.seed, "em");
  auto fitted = em::fit(history, ecfg);
  bootstrap_accumulators(fitted.model, static_cast<double>(history.rows()));
  igmm::Config icfg = cfg.igmm;
  if (!(icfg.s_ini > 0.0)) icfg.s_ini = igmm::s_ini_from_data(history);

  Gmm model = fitted.model;
  std::vector<double> igmm_seconds;
  for (Eigen::Index t = 0; t < stream.rows(); ++t) {
    const auto start = std::chrono::steady_clock::now();
    model = igmm::step(model, stream.row(t).transpose(), icfg).first;
    igmm_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count());
  }

  // refit path: full EM on the grown dataset at strided update indices
  auto refit = em::time_refit(history, stream, ecfg, em_stride);

  std::ofstream out(out_path(args, "bench.csv"));
  out << "update_index,igmm_seconds,em_refit_seconds\n"
      << std::setprecision(17);
  std::size_t r = 0;
  for (Eigen::Index t = 0; t < stream.rows(); ++t) {
    out << t << ',' << igmm_seconds[t] << ',';
    if (r < refit.update_index.size() && refit.update_index[r] == t)
      out << refit.seconds[r++];
    out << "\n";
  }

  auto igmm_summary = metrics::timing_report(igmm_seconds);
  auto em_summary = metrics::timing_report(refit.seconds);
  json summary;
  summary["updates"] = stream.rows();
  summary["em_stride"] = em_stride;
  summary["igmm"] = {{"min_s", igmm_summary.min_s},
                     {"max_s", igmm_summary.max_s},
                     {"mean_s", igmm_summary.mean_s},
                     {"trend", igmm_summary.trend}};
  summary["em_refit"] = {{"min_s", em_summary.min_s},
                         {"max_s", em_summary.max_s},
                         {"mean_s", em_summary.mean_s},
                         {"trend", em_summary.trend}};
  summary["mean_ratio"] = em_summary.mean_s / igmm_summary.mean_s;
  io::save_json(out_path(args, "bench_summary.json").string(), summary);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed incremental GMM updates for wind power forecast "
               "error"};
  app.require_subcommand(1);

  CommonArgs common;

  // synth
  auto* synth = app.add_subcommand("synth", "sample a CSV dataset from a model");
  std::string synth_truth, synth_out = "synthetic.csv";
  int synth_n = 1920;
  synth->add_option("--truth", synth_truth, "truth model JSON")->required();
  synth->add_option("--n", synth_n, "number of rows");
  synth->add_option("--out", synth_out, "output CSV path");
  add_common(synth, &common);

  // fit-em
  auto* fit = app.add_subcommand("fit-em", "batch EM fit (benchmark / old PD)");
  std::string fit_data;
  int fit_rows = 0, fit_components = 0;
  fit->add_option("--data", fit_data, "training CSV")->required();
  fit->add_option("--rows", fit_rows, "use only the first N rows");
  fit->add_option("--components", fit_components, "mixture size override");
  add_common(fit, &common);

  // run-centralized-igmm
  auto* central = app.add_subcommand("run-centralized-igmm",
                                     "point-wise incremental updates");
  std::string central_model, central_data;
  int central_every = 0;
  central->add_option("--model", central_model, "starting model JSON")
      ->required();
  central->add_option("--data", central_data, "update stream CSV")->required();
  central->add_option("--snapshot-every", central_every,
                      "snapshot period in updates");
  add_common(central, &common);

  // run-distributed
  auto* distributed =
      app.add_subcommand("run-distributed", "full distributed update scheme");
  std::string dist_model, dist_data, dist_topology, dist_y0;
  int dist_every = 0;
  distributed->add_option("--model", dist_model, "starting model JSON")
      ->required();
  distributed->add_option("--data", dist_data, "update stream CSV")->required();
  distributed->add_option("--topology", dist_topology, "topology JSON");
  distributed->add_option("--snapshot-every", dist_every,
                          "snapshot period in updates");
  distributed->add_option("--y0", dist_y0,
                          "conditioning forecasts (comma separated)");
  add_common(distributed, &common);

  // derive
  auto* derive = app.add_subcommand("derive", "conditional distributions");
  std::string derive_model, derive_snapshots, derive_topology, derive_y0;
  derive->add_option("--model", derive_model, "joint model JSON");
  derive->add_option("--snapshots", derive_snapshots, "node snapshots JSON");
  derive->add_option("--topology", derive_topology, "topology JSON");
  derive->add_option("--y0", derive_y0, "conditioning forecasts")->required();
  add_common(derive, &common);

  // compare
  auto* compare = app.add_subcommand("compare", "divergence / error metrics");
  std::string cmp_a, cmp_b, cmp_metric = "js";
  int cmp_marginal = -1, cmp_node = 0, cmp_samples = 100000;
  compare->add_option("--a", cmp_a, "first artifact")->required();
  compare->add_option("--b", cmp_b, "second artifact")->required();
  compare->add_option("--metric", cmp_metric, "js or rse")
      ->check(CLI::IsMember({"js", "rse"}));
  compare->add_option("--marginal", cmp_marginal,
                      "compare this 1-D marginal on a grid");
  compare->add_option("--node", cmp_node,
                      "node index (0-based) for snapshot inputs");
  compare->add_option("--samples", cmp_samples, "Monte-Carlo sample count");
  add_common(compare, &common);

  // bench
  auto* bench = app.add_subcommand("bench", "EM refit vs incremental timing");
  std::string bench_data;
  int bench_stride = 1, bench_updates = 0;
  bench->add_option("--data", bench_data, "full dataset CSV")->required();
  bench->add_option("--em-stride", bench_stride,
                    "time the EM refit every K-th update");
  bench->add_option("--updates", bench_updates, "cap on update count");
  add_common(bench, &common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(common, synth_truth, synth_n, synth_out);
    if (fit->parsed()) return cmd_fit_em(common, fit_data, fit_rows, fit_components);
    if (central->parsed())
      return cmd_run_centralized(common, central_model, central_data,
                                 central_every);
    if (distributed->parsed())
      return cmd_run_distributed(common, dist_model, dist_data, dist_topology,
                                 dist_every, dist_y0);
    if (derive->parsed())
      return cmd_derive(common, derive_model, derive_snapshots, derive_topology,
                        derive_y0);
    if (compare->parsed())
      return cmd_compare(common, cmp_a, cmp_b, cmp_metric, cmp_marginal,
                         cmp_node, cmp_samples);
    if (bench->parsed())
      return cmd_bench(common, bench_data, bench_stride, bench_updates);
  } catch (const std::exception& e) {
    json err;
    err["error"] = true;
    err["type"] = typeid(e).name();
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
