#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "digmm/netsim.hpp"
#include "oracles.hpp"

using namespace digmm;

TEST_CASE("scalar-sum phase wraps the consensus result and counts rounds") {
  auto triangle = consensus::build_topology({{0, 1}, {1, 2}, {0, 2}}, 3);
  consensus::Config cfg;
  netsim::SimStats stats;
  std::vector<Vector> locals{Vector::Constant(1, 1.0), Vector::Constant(1, 2.0),
                             Vector::Constant(1, 3.0)};
  auto out = netsim::run_phase(triangle, locals, netsim::PhaseKind::ScalarSum,
                               cfg, stats);
  for (const auto& v : out) CHECK(v(0) == doctest::Approx(6.0).epsilon(1e-9));
  REQUIRE(stats.rounds_per_consensus.size() == 1);
  CHECK(stats.rounds_per_consensus[0] >= 1);
  // one scalar per edge direction per round
  CHECK(stats.messages_total ==
        static_cast<std::int64_t>(stats.rounds_per_consensus[0]) * 2 * 3);
}

TEST_CASE("single-node graph needs no rounds or messages") {
  auto solo = consensus::build_topology({}, 1);
  consensus::Config cfg;
  netsim::SimStats stats;
  std::vector<Vector> locals{Vector::Constant(1, 4.25)};
  auto out = netsim::run_phase(solo, locals, netsim::PhaseKind::ScalarSum, cfg,
                               stats);
  CHECK(out[0](0) == 4.25);
  CHECK(stats.rounds_per_consensus[0] == 0);
  CHECK(stats.messages_total == 0);
}

TEST_CASE("vector-collect phase accounts for its width") {
  auto pair = consensus::build_topology({{0, 1}}, 2);
  consensus::Config cfg;
  netsim::SimStats stats;
  std::vector<Vector> contrib(2, Vector::Zero(4));
  contrib[0](0) = 1.0;
  contrib[0](2) = 2.0;
  contrib[1](1) = 3.0;
  contrib[1](3) = 4.0;
  auto out = netsim::run_phase(pair, contrib, netsim::PhaseKind::VectorCollect,
                               cfg, stats);
  Vector want(4);
  want << 1.0, 3.0, 2.0, 4.0;
  for (const auto& v : out) CHECK((v - want).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(stats.messages_total ==
        static_cast<std::int64_t>(stats.rounds_per_consensus[0]) * 2 * 1 * 4);
}

TEST_CASE("replaying a phase is bitwise identical") {
  std::mt19937_64 rng(31);
  std::vector<std::pair<int, int>> edges;
  for (int m = 0; m < 7; ++m) edges.emplace_back(m, (m + 1) % 7);
  edges.emplace_back(0, 3);
  auto topo = consensus::build_topology(edges, 7);
  consensus::Config cfg;
  std::vector<Vector> locals;
  for (int m = 0; m < 7; ++m) locals.push_back(oracle::random_vector(3, rng));

  netsim::SimStats stats_a, stats_b;
  auto a = netsim::run_phase(topo, locals, netsim::PhaseKind::ScalarSum, cfg,
                             stats_a);
  auto b = netsim::run_phase(topo, locals, netsim::PhaseKind::ScalarSum, cfg,
                             stats_b);
  for (int m = 0; m < 7; ++m) CHECK(a[m].isApprox(b[m], 0.0));
  CHECK(stats_a.rounds_per_consensus == stats_b.rounds_per_consensus);
  CHECK(stats_a.messages_total == stats_b.messages_total);
}

TEST_CASE("non-convergence propagates out of the fabric") {
  auto pair = consensus::build_topology({{0, 1}}, 2);
  consensus::Config cfg;
  cfg.max_rounds = 1;
  cfg.tolerance = 1e-16;
  netsim::SimStats stats;
  std::vector<Vector> locals{Vector::Constant(1, 0.0),
                             Vector::Constant(1, 10.0)};
  CHECK_THROWS_AS(netsim::run_phase(pair, locals, netsim::PhaseKind::ScalarSum,
                                    cfg, stats),
                  NonConvergence);
}
