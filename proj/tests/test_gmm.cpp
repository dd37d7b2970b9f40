#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "digmm/gmm.hpp"
#include "oracles.hpp"

using namespace digmm;

namespace {

GaussianComponent make_comp(const Vector& mu, const Matrix& sigma,
                            double w = 1.0) {
  GaussianComponent c;
  c.weight = w;
  c.mean = mu;
  c.covariance = sigma;
  c.accumulator = 1.0;
  return c;
}

Gmm single(const Vector& mu, const Matrix& sigma) {
  Gmm g;
  g.dimension = static_cast<int>(mu.size());
  g.components.push_back(make_comp(mu, sigma));
  return g;
}

}  // namespace

TEST_CASE("component density at and away from the mean") {
  Gmm g = single(Vector::Zero(2), Matrix::Identity(2, 2));
  CHECK(component_density(g.components[0], Vector::Zero(2)) ==
        doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
  Vector u(2);
  u << 1.0, 1.0;
  CHECK(component_density(g.components[0], u) ==
        doctest::Approx(std::exp(-1.0) / (2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("component density matches the dense-inverse oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 5;
    Vector mu = oracle::random_vector(d, rng);
    Matrix sigma = oracle::random_pd(d, rng);
    Vector u = oracle::random_vector(d, rng);
    const double want = oracle::dense_density(mu, sigma, u);
    const double got = component_density(make_comp(mu, sigma), u);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("mixture density degenerate and random cases") {
  std::mt19937_64 rng(11);
  Gmm one = oracle::random_mixture(4, 1, rng);
  Vector u = oracle::random_vector(4, rng);
  CHECK(mixture_density(one, u) ==
        doctest::Approx(component_density(one.components[0], u)).epsilon(1e-14));

  Gmm twin = one;
  twin.components.push_back(twin.components[0]);
  twin.components[0].weight = 0.5;
  twin.components[1].weight = 0.5;
  CHECK(mixture_density(twin, u) ==
        doctest::Approx(component_density(one.components[0], u)).epsilon(1e-14));

  Gmm three = oracle::random_mixture(3, 3, rng);
  Vector v = oracle::random_vector(3, rng);
  CHECK(mixture_density(three, v) ==
        doctest::Approx(oracle::dense_mixture_density(three, v)).epsilon(1e-14));

  Gmm empty;
  empty.dimension = 2;
  CHECK_THROWS_AS(mixture_density(empty, Vector::Zero(2)), InvalidModel);
}

TEST_CASE("mahalanobis distance") {
  Vector mu = Vector::Zero(4);
  auto comp = make_comp(mu, Matrix::Identity(4, 4));
  CHECK(mahalanobis_sq(comp, mu) == doctest::Approx(0.0).epsilon(1e-15));
  Vector u(4);
  u << 3.0, 4.0, 0.0, 0.0;
  CHECK(mahalanobis_sq(comp, u) == doctest::Approx(25.0).epsilon(1e-13));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 6;
    Vector m = oracle::random_vector(d, rng);
    Matrix s = oracle::random_pd(d, rng);
    Vector x = oracle::random_vector(d, rng);
    CHECK(mahalanobis_sq(make_comp(m, s), x) ==
          doctest::Approx(oracle::dense_mahalanobis_sq(m, s, x)).epsilon(1e-12));
  }
}

TEST_CASE("mahalanobis whitening property") {
  std::mt19937_64 rng(17);
  const int d = 5;
  Vector mu = oracle::random_vector(d, rng);
  Matrix sigma = oracle::random_pd(d, rng);
  Matrix l = Matrix(cholesky_with_jitter(sigma).matrixL());
  for (int trial = 0; trial < 10; ++trial) {
    Vector s = oracle::random_vector(d, rng);
    Vector u = mu + l * s;
    CHECK(mahalanobis_sq(make_comp(mu, sigma), u) ==
          doctest::Approx(s.squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("posterior responsibilities") {
  std::mt19937_64 rng(19);
  Gmm one = oracle::random_mixture(3, 1, rng);
  Vector u = oracle::random_vector(3, rng);
  Vector p1 = posterior(one, u);
  REQUIRE(p1.size() == 1);
  CHECK(p1(0) == doctest::Approx(1.0));

  // identical components keep their prior weights at any point
  Gmm twin = one;
  twin.components.push_back(twin.components[0]);
  twin.components[0].weight = 0.3;
  twin.components[1].weight = 0.7;
  Vector p2 = posterior(twin, u);
  CHECK(p2(0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(p2(1) == doctest::Approx(0.7).epsilon(1e-12));

  for (int trial = 0; trial < 10; ++trial) {
    Gmm g = oracle::random_mixture(4, 3, rng);
    Vector x = oracle::random_vector(4, rng);
    Vector p = posterior(g, x);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    double denom = oracle::dense_mixture_density(g, x);
    for (int j = 0; j < g.size(); ++j) {
      const auto& c = g.components[j];
      const double want =
          c.weight * oracle::dense_density(c.mean, c.covariance, x) / denom;
      CHECK(p(j) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("posterior from cached distances matches direct evaluation") {
  std::mt19937_64 rng(23);
  Gmm g = oracle::random_mixture(4, 3, rng);
  Vector u = oracle::random_vector(4, rng);
  std::vector<double> lw, d2, ld;
  for (const auto& c : g.components) {
    ComponentEval ev(c);
    lw.push_back(std::log(c.weight));
    d2.push_back(ev.mahalanobis_sq(u));
    ld.push_back(ev.log_det());
  }
  Vector from_d2 = posterior_from_distances(lw, d2, ld);
  Vector direct = posterior(g, u);
  for (int j = 0; j < g.size(); ++j)
    CHECK(from_d2(j) == doctest::Approx(direct(j)).epsilon(1e-14));
}

TEST_CASE("block partition of a joint covariance") {
  Gmm g = single(Vector::Zero(4), Matrix::Identity(4, 4));
  BlockView v = block_view(g.components[0], 2);
  CHECK(v.a_block.isApprox(Matrix::Identity(2, 2)));
  CHECK(v.c_block.isApprox(Matrix::Identity(2, 2)));
  CHECK(v.b_block.isZero(0.0));
  CHECK(v.c_inverse.isApprox(Matrix::Identity(2, 2)));

  // literal submatrix indexing on a hand-built symmetric PD matrix
  Matrix s(4, 4);
  s << 4.0, 0.5, 0.3, 0.1,
       0.5, 3.0, 0.2, 0.4,
       0.3, 0.2, 2.0, 0.6,
       0.1, 0.4, 0.6, 1.5;
  BlockView w = block_view(make_comp(Vector::Zero(4), s), 2);
  CHECK(w.a_block(0, 1) == 0.5);
  CHECK(w.b_block(0, 0) == 0.3);
  CHECK(w.b_block(1, 1) == 0.4);
  CHECK(w.c_block(0, 1) == 0.6);
  CHECK(w.b_row(1)(0) == 0.2);

  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix cov = oracle::random_pd(6, rng);
    BlockView bv = block_view(make_comp(Vector::Zero(6), cov), 3);
    CHECK((bv.c_inverse * bv.c_block - Matrix::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
  }
}

TEST_CASE("centralized conditioning: bivariate closed form") {
  Matrix s(2, 2);
  s << 2.0, 1.0, 1.0, 1.0;
  Gmm g = single(Vector::Zero(2), s);
  Vector y0 = Vector::Constant(1, 1.0);
  auto cond = condition_centralized(g, y0);
  REQUIRE(cond.size() == 1);
  REQUIRE(cond[0].size() == 1);
  CHECK(cond[0][0].alpha == doctest::Approx(1.0));
  CHECK(cond[0][0].lambda == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cond[0][0].delta == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("centralized conditioning: independence and random oracle") {
  std::mt19937_64 rng(31);
  const int m = 3;
  // B = 0: conditional mean/variance reduce to the power block
  Gmm indep;
  indep.dimension = 2 * m;
  for (int j = 0; j < 2; ++j) {
    Matrix cov = Matrix::Zero(2 * m, 2 * m);
    cov.topLeftCorner(m, m) = oracle::random_pd(m, rng);
    cov.bottomRightCorner(m, m) = oracle::random_pd(m, rng);
    indep.components.push_back(
        make_comp(oracle::random_vector(2 * m, rng), cov, 0.5));
  }
  Vector y0 = oracle::random_vector(m, rng);
  auto cond = condition_centralized(indep, y0);
  for (int mm = 0; mm < m; ++mm)
    for (int j = 0; j < 2; ++j) {
      CHECK(cond[mm][j].lambda ==
            doctest::Approx(indep.components[j].mean(mm)).epsilon(1e-12));
      CHECK(cond[mm][j].delta ==
            doctest::Approx(indep.components[j].covariance(mm, mm))
                .epsilon(1e-12));
    }

  for (int trial = 0; trial < 5; ++trial) {
    Gmm g = oracle::random_mixture(2 * m, 2, rng);
    Vector y = oracle::random_vector(m, rng);
    auto got = condition_centralized(g, y);

    // alpha oracle: density ratio on the forecast block, dense route
    double denom = 0.0;
    std::vector<double> num(g.size());
    for (int j = 0; j < g.size(); ++j) {
      const auto& c = g.components[j];
      Vector mu_y = c.mean.tail(m);
      Matrix cy = c.covariance.bottomRightCorner(m, m);
      num[j] = c.weight * oracle::dense_density(mu_y, cy, y);
      denom += num[j];
    }
    double alpha_sum = 0.0;
    for (int j = 0; j < g.size(); ++j) {
      CHECK(got[0][j].alpha == doctest::Approx(num[j] / denom).epsilon(1e-10));
      alpha_sum += got[0][j].alpha;
      for (int mm = 0; mm < m; ++mm) {
        CHECK(got[mm][j].delta > 0.0);
        CHECK(got[mm][j].delta <=
              g.components[j].covariance(mm, mm) + 1e-12);
      }
    }
    CHECK(alpha_sum == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("marginal mixtures") {
  std::mt19937_64 rng(37);
  Gmm g = oracle::random_mixture(6, 3, rng);

  std::vector<int> all{0, 1, 2, 3, 4, 5};
  Gmm same = marginal(g, all);
  for (int j = 0; j < g.size(); ++j) {
    CHECK(same.components[j].mean.isApprox(g.components[j].mean));
    CHECK(same.components[j].covariance.isApprox(g.components[j].covariance));
  }

  Vector diag(3);
  diag << 1.0, 4.0, 9.0;
  Gmm d3 = single(Vector::Zero(3), Matrix(diag.asDiagonal()));
  Gmm d1 = marginal(d3, {2});
  CHECK(d1.dimension == 1);
  CHECK(d1.components[0].covariance(0, 0) == doctest::Approx(9.0));

  // composition: marginal of a marginal equals the composed index set
  Gmm ab = marginal(marginal(g, {1, 3, 5}), {0, 2});
  Gmm direct = marginal(g, {1, 5});
  for (int j = 0; j < g.size(); ++j) {
    CHECK(ab.components[j].mean.isApprox(direct.components[j].mean));
    CHECK(ab.components[j].covariance.isApprox(direct.components[j].covariance));
  }

  CHECK_THROWS_AS(marginal(g, {}), std::invalid_argument);
  CHECK_THROWS_AS(marginal(g, {6}), std::invalid_argument);
}

TEST_CASE("marginal agrees with a sampling oracle") {
  std::mt19937_64 rng(41);
  Gmm g = oracle::random_mixture(4, 2, rng);
  Gmm m0 = marginal(g, {0});
  Matrix draws = sample(g, 100000, 4242);
  std::vector<double> proj(draws.rows());
  for (Eigen::Index i = 0; i < draws.rows(); ++i) proj[i] = draws(i, 0);
  const double ks = oracle::ks_distance(proj, [&](double x) {
    Vector gx = Vector::Constant(1, x);
    return cdf_1d(m0, gx)(0);
  });
  CHECK(ks < 0.02);
}

TEST_CASE("pdf and cdf of 1-D mixtures") {
  Gmm std_normal = single(Vector::Zero(1), Matrix::Identity(1, 1));
  Vector zero = Vector::Zero(1);
  CHECK(cdf_1d(std_normal, zero)(0) == doctest::Approx(0.5).epsilon(1e-14));

  std::mt19937_64 rng(43);
  Gmm mix = oracle::random_mixture(1, 3, rng);
  const double lo = -40.0, hi = 40.0;
  const int n = 40001;
  Vector grid = Vector::LinSpaced(n, lo, hi);
  Vector pdf = pdf_1d(mix, grid);
  CHECK(pdf.minCoeff() >= 0.0);
  double integral = 0.0;
  const double dx = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i)
    integral += pdf(i) * ((i == 0 || i == n - 1) ? 0.5 : 1.0) * dx;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));

  Vector cdf = cdf_1d(mix, grid);
  for (int i = 1; i < n; ++i) CHECK(cdf(i) >= cdf(i - 1));
  CHECK(cdf(0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cdf(n - 1) == doctest::Approx(1.0).epsilon(1e-9));

  // linearity: mixture cdf is the weighted sum of component cdfs
  Vector acc = Vector::Zero(n);
  for (const auto& c : mix.components) {
    Gmm one = single(c.mean, c.covariance);
    acc += c.weight * cdf_1d(one, grid);
  }
  CHECK((acc - cdf).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("jitter policy repairs or rejects") {
  // singular PSD: jitter makes it factorizable
  Matrix singular = Matrix::Zero(3, 3);
  singular(0, 0) = 1.0;
  singular(1, 1) = 1.0;  // rank 2
  double used = 0.0;
  CHECK_NOTHROW(cholesky_with_jitter(singular, &used));
  CHECK(used > 0.0);

  // indefinite far beyond the jitter cap: rejected
  Matrix bad = -Matrix::Identity(3, 3);
  bad(0, 0) = 3.1;  // positive trace, still indefinite
  CHECK_THROWS_AS(cholesky_with_jitter(bad), DegenerateCovariance);
}

TEST_CASE("sampling is deterministic per seed") {
  std::mt19937_64 rng(47);
  Gmm g = oracle::random_mixture(3, 2, rng);
  Matrix a = sample(g, 64, 99);
  Matrix b = sample(g, 64, 99);
  CHECK(a.isApprox(b, 0.0));
}

TEST_CASE("accumulator bootstrap follows the weights") {
  std::mt19937_64 rng(53);
  Gmm g = oracle::random_mixture(2, 3, rng);
  bootstrap_accumulators(g, 960.0);
  double total = 0.0;
  for (const auto& c : g.components) {
    CHECK(c.accumulator == doctest::Approx(c.weight * 960.0));
    total += c.accumulator;
  }
  CHECK(total == doctest::Approx(960.0).epsilon(1e-12));
}
