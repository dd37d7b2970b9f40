#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "digmm/em.hpp"
#include "digmm/metrics.hpp"
#include "oracles.hpp"

using namespace digmm;

TEST_CASE("single-component fit recovers the sample moments") {
  std::mt19937_64 rng(3);
  Gmm truth = oracle::random_mixture(3, 1, rng);
  Matrix data = sample(truth, 400, 17);

  em::Config cfg;
  cfg.num_components = 1;
  auto fitted = em::fit(data, cfg);

  Vector mean = data.colwise().mean().transpose();
  Matrix centered = data.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * centered / data.rows();
  CHECK((fitted.model.components[0].mean - mean).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((fitted.model.components[0].covariance - cov).cwiseAbs().maxCoeff() <
        1e-10);
  CHECK(fitted.model.components[0].weight == doctest::Approx(1.0));
}

TEST_CASE("well-separated clusters are recovered with their proportions") {
  std::mt19937_64 rng(5);
  Gmm truth;
  truth.dimension = 2;
  GaussianComponent a, b;
  a.weight = 0.65;
  a.mean = Vector::Zero(2);
  a.covariance = 0.01 * Matrix::Identity(2, 2);  // sigma = 0.1
  b.weight = 0.35;
  b.mean = Vector::Constant(2, 2.0);  // 20 sigma away
  b.covariance = 0.01 * Matrix::Identity(2, 2);
  truth.components = {a, b};

  Matrix data = sample(truth, 1000, 29);
  int near_a = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    if (data.row(i).norm() < 1.0) ++near_a;
  const double proportion_a = near_a / 1000.0;

  em::Config cfg;
  cfg.num_components = 2;
  cfg.seed = 1;
  auto fitted = em::fit(data, cfg);
  std::vector<double> weights{fitted.model.components[0].weight,
                              fitted.model.components[1].weight};
  std::sort(weights.begin(), weights.end());
  CHECK(std::abs(weights[1] - std::max(proportion_a, 1.0 - proportion_a)) <
        0.02);
  CHECK(std::abs(weights[0] - std::min(proportion_a, 1.0 - proportion_a)) <
        0.02);
}

TEST_CASE("log-likelihood trace is nondecreasing") {
  std::mt19937_64 rng(7);
  Gmm truth = oracle::random_mixture(4, 3, rng);
  Matrix data = sample(truth, 600, 31);
  em::Config cfg;
  cfg.num_components = 3;
  cfg.seed = 2;
  auto fitted = em::fit(data, cfg);
  REQUIRE(fitted.log_likelihood_trace.size() >= 2);
  for (std::size_t i = 1; i < fitted.log_likelihood_trace.size(); ++i)
    CHECK(fitted.log_likelihood_trace[i] >=
          fitted.log_likelihood_trace[i - 1] -
              1e-8 * (1.0 + std::abs(fitted.log_likelihood_trace[i])));
}

TEST_CASE("fits are bit-identical for a fixed seed") {
  std::mt19937_64 rng(11);
  Gmm truth = oracle::random_mixture(3, 2, rng);
  Matrix data = sample(truth, 300, 37);
  em::Config cfg;
  cfg.num_components = 2;
  cfg.seed = 123;
  auto a = em::fit(data, cfg);
  auto b = em::fit(data, cfg);
  REQUIRE(a.model.size() == b.model.size());
  CHECK(a.iterations == b.iterations);
  for (int j = 0; j < a.model.size(); ++j) {
    CHECK(a.model.components[j].weight == b.model.components[j].weight);
    CHECK(a.model.components[j].mean.isApprox(b.model.components[j].mean, 0.0));
    CHECK(a.model.components[j].covariance.isApprox(
        b.model.components[j].covariance, 0.0));
  }
}

TEST_CASE("random-responsibility init also converges") {
  std::mt19937_64 rng(13);
  Gmm truth = oracle::random_mixture(2, 2, rng);
  Matrix data = sample(truth, 300, 41);
  em::Config cfg;
  cfg.num_components = 2;
  cfg.init = em::Config::Init::RandomResponsibility;
  auto fitted = em::fit(data, cfg);
  fitted.model.validate();
}

TEST_CASE("degenerate inputs are rejected") {
  em::Config cfg;
  cfg.num_components = 3;
  Matrix tiny = Matrix::Random(3, 2);
  CHECK_THROWS_AS(em::fit(tiny, cfg), InsufficientData);
  Matrix nan_data = Matrix::Zero(10, 2);
  nan_data(4, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(em::fit(nan_data, cfg), DataFormatError);
}

TEST_CASE("refit timing grows with the dataset") {
  std::mt19937_64 rng(17);
  Gmm truth = oracle::random_mixture(4, 2, rng);
  Matrix history = sample(truth, 300, 43);
  Matrix fresh = sample(truth, 160, 47);

  em::Config cfg;
  cfg.num_components = 2;
  cfg.seed = 3;
  cfg.max_iterations = 20;
  cfg.tolerance = 1e-300;  // fixed work per refit for a clean trend
  auto timing = em::time_refit(history, fresh, cfg);
  REQUIRE(timing.seconds.size() == 160);
  for (double s : timing.seconds) CHECK(s > 0.0);
  const auto summary = metrics::timing_report(timing.seconds);
  CHECK(summary.trend > 0.8);

  // matched-size refits stay within 3x of each other
  std::vector<double> repeats;
  for (int k = 0; k < 5; ++k) {
    auto t = em::time_refit(history, fresh.topRows(1), cfg);
    repeats.push_back(t.seconds[0]);
  }
  const double lo = *std::min_element(repeats.begin(), repeats.end());
  const double hi = *std::max_element(repeats.begin(), repeats.end());
  CHECK(hi < 3.0 * lo);
}
