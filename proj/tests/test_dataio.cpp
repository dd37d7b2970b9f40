#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "digmm/dataio.hpp"
#include "oracles.hpp"

using namespace digmm;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

Gmm truth_2site(std::mt19937_64& rng) {
  Gmm g = oracle::random_mixture(4, 2, rng, 0.05, 0.002);
  for (auto& c : g.components) c.mean.array() += 0.5;  // keep values in-range
  return g;
}

}  // namespace

TEST_CASE("csv loading normalizes, drops bad rows, and counts them") {
  TempFile f("dataio_basic.csv",
             "timestamp,site1_power,site1_forecast,site2_power,site2_forecast\n"
             "2020-01-01T00:00:00,5.0,4.0,6.0,5.5\n"
             "2020-01-01T01:00:00,5.5,,6.1,5.6\n"
             "2020-01-01T02:00:00,4.0,4.2,5.0,5.2\n"
             "2020-01-01T03:00:00,3.0,3.5,4.0,4.5\n"
             "2020-01-01T04:00:00,2.0,2.5,3.0,3.5\n");
  dataio::LoadReport report;
  auto data = dataio::load_csv(f.path, {10.0, 12.0}, &report);
  CHECK(data.rows() == 4);
  CHECK(data.sites() == 2);
  CHECK(report.rows_dropped == 1);
  CHECK(data.power(0, 0) == doctest::Approx(0.5));     // 5 MW of 10 MW
  CHECK(data.forecast(0, 1) == doctest::Approx(5.5 / 12.0));
  CHECK(data.timestamps[1] == "2020-01-01T02:00:00");

  Matrix joint = data.joint();
  CHECK(joint.cols() == 4);
  CHECK(joint(0, 0) == data.power(0, 0));
  CHECK(joint(0, 2) == data.forecast(0, 0));
  CHECK(data.error_column(0)(0) ==
        doctest::Approx(data.power(0, 0) - data.forecast(0, 0)));
}

TEST_CASE("csv schema and timestamp violations are rejected") {
  TempFile bad_header("dataio_header.csv",
                      "time,site1_power,site1_forecast\n"
                      "2020-01-01T00:00:00,1.0,1.0\n");
  CHECK_THROWS_AS(dataio::load_csv(bad_header.path, {10.0}), DataFormatError);

  TempFile backwards("dataio_time.csv",
                     "timestamp,site1_power,site1_forecast\n"
                     "2020-01-01T02:00:00,1.0,1.0\n"
                     "2020-01-01T01:00:00,1.0,1.0\n");
  CHECK_THROWS_AS(dataio::load_csv(backwards.path, {10.0}), DataFormatError);

  TempFile fine("dataio_cap.csv",
                "timestamp,site1_power,site1_forecast\n"
                "2020-01-01T00:00:00,1.0,1.0\n");
  CHECK_THROWS_AS(dataio::load_csv(fine.path, {0.0}), DataFormatError);
  CHECK_THROWS_AS(dataio::load_csv("no_such_file.csv", {1.0}),
                  DataFormatError);
}

TEST_CASE("out-of-range per-unit values count as dropped rows") {
  TempFile f("dataio_range.csv",
             "timestamp,site1_power,site1_forecast\n"
             "2020-01-01T00:00:00,15.0,4.0\n"  // 1.5 per-unit
             "2020-01-01T01:00:00,5.0,4.0\n");
  dataio::LoadReport report;
  auto data = dataio::load_csv(f.path, {10.0}, &report);
  CHECK(data.rows() == 1);
  CHECK(report.rows_dropped == 1);
}

TEST_CASE("write/read round-trip preserves values") {
  std::mt19937_64 rng(3);
  Gmm truth = truth_2site(rng);
  auto data = dataio::synth_from_gmm(truth, 50, 17);
  const std::vector<double> capacities{8.0, 12.5};
  dataio::write_csv("dataio_roundtrip.csv", data, capacities);
  auto back = dataio::load_csv("dataio_roundtrip.csv", capacities);
  std::remove("dataio_roundtrip.csv");
  REQUIRE(back.rows() == 50);
  CHECK((back.power - data.power).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.forecast - data.forecast).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(back.timestamps == data.timestamps);
}

TEST_CASE("splitting keeps order and restores on concatenation") {
  std::mt19937_64 rng(5);
  Gmm truth = truth_2site(rng);
  auto data = dataio::synth_from_gmm(truth, 1920, 23);
  auto [hist, fresh] = dataio::split(data, 960);
  CHECK(hist.rows() == 960);
  CHECK(fresh.rows() == 960);
  CHECK(hist.timestamps.front() == data.timestamps.front());
  CHECK(fresh.timestamps.back() == data.timestamps.back());
  CHECK(hist.power.row(959).isApprox(data.power.row(959)));
  CHECK(fresh.power.row(0).isApprox(data.power.row(960)));

  auto [one, rest] = dataio::split(data, 1);
  CHECK(one.rows() == 1);
  CHECK(rest.rows() == 1919);

  CHECK_THROWS_AS(dataio::split(data, 0), std::invalid_argument);
  CHECK_THROWS_AS(dataio::split(data, 1920), std::invalid_argument);
}

TEST_CASE("synthetic datasets are deterministic and match the truth moments") {
  std::mt19937_64 rng(7);
  Gmm truth = truth_2site(rng);

  auto empty = dataio::synth_from_gmm(truth, 0, 1);
  CHECK(empty.rows() == 0);

  auto a = dataio::synth_from_gmm(truth, 200, 31);
  auto b = dataio::synth_from_gmm(truth, 200, 31);
  CHECK(a.power.isApprox(b.power, 0.0));
  CHECK(a.forecast.isApprox(b.forecast, 0.0));

  const int n = 100000;
  auto big = dataio::synth_from_gmm(truth, n, 37);
  Matrix joint = big.joint();
  // mixture mean and a 3-sigma/sqrt(n) CLT band per coordinate
  Vector mix_mean = Vector::Zero(4);
  for (const auto& c : truth.components) mix_mean += c.weight * c.mean;
  for (int d = 0; d < 4; ++d) {
    double var = 0.0;
    for (const auto& c : truth.components)
      var += c.weight * (c.covariance(d, d) +
                         (c.mean(d) - mix_mean(d)) * (c.mean(d) - mix_mean(d)));
    const double band = 3.0 * std::sqrt(var / n);
    CHECK(std::abs(joint.col(d).mean() - mix_mean(d)) < band);
  }
}
