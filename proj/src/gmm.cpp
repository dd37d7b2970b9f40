#include "digmm/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace digmm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)
constexpr double kWeightTol = 1e-10;

double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

void Gmm::validate() const {
  if (components.empty()) throw InvalidModel("mixture has no components");
  double wsum = 0.0;
  for (const auto& c : components) {
    if (c.dimension() != dimension ||
        c.covariance.rows() != dimension || c.covariance.cols() != dimension)
      throw InvalidModel("component dimension mismatch");
    if (!(c.weight > 0.0)) throw InvalidModel("non-positive component weight");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > kWeightTol)
    throw InvalidModel("weights do not sum to 1");
}

Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& covariance,
                                        double* jitter_used) {
  const int n = static_cast<int>(covariance.rows());
  if (jitter_used) *jitter_used = 0.0;
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() == Eigen::Success) return llt;

  const double scale = covariance.trace() / n;
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw DegenerateCovariance("covariance has non-positive trace");
  for (double eps = 1e-10; eps <= 1e-6 * 1.0000001; eps *= 10.0) {
    const double jitter = eps * scale;
    llt.compute(covariance + jitter * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      if (jitter_used) *jitter_used = jitter;
      return llt;
    }
  }
  throw DegenerateCovariance("covariance not positive definite after jitter");
}

ComponentEval::ComponentEval(const Vector& mean, const Matrix& covariance)
    : mean_(mean) {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
    throw InvalidModel("covariance shape does not match mean");
  llt_ = cholesky_with_jitter(covariance, &jitter_);
  log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

double ComponentEval::mahalanobis_sq(const Vector& u) const {
  if (u.size() != mean_.size())
    throw std::invalid_argument("point dimension mismatch");
  Vector y = llt_.matrixL().solve(u - mean_);
  return y.squaredNorm();
}

double ComponentEval::log_density(const Vector& u) const {
  const double d = static_cast<double>(mean_.size());
  return -0.5 * (mahalanobis_sq(u) + log_det_ + d * kLog2Pi);
}

Matrix ComponentEval::inverse() const {
  const int n = static_cast<int>(mean_.size());
  return llt_.solve(Matrix::Identity(n, n));
}

double component_log_density(const GaussianComponent& comp, const Vector& u) {
  return ComponentEval(comp).log_density(u);
}

double component_density(const GaussianComponent& comp, const Vector& u) {
  return std::exp(component_log_density(comp, u));
}

double mixture_log_density(const Gmm& gmm, const Vector& u) {
  if (gmm.empty()) throw InvalidModel("mixture has no components");
  std::vector<double> terms;
  terms.reserve(gmm.components.size());
  for (const auto& c : gmm.components)
    terms.push_back(std::log(c.weight) + component_log_density(c, u));
  return log_sum_exp(terms);
}

double mixture_density(const Gmm& gmm, const Vector& u) {
  return std::exp(mixture_log_density(gmm, u));
}

double mahalanobis_sq(const GaussianComponent& comp, const Vector& u) {
  return ComponentEval(comp).mahalanobis_sq(u);
}

Vector posterior_from_distances(const std::vector<double>& log_weights,
                                const std::vector<double>& d_squared,
                                const std::vector<double>& log_dets,
                                bool* degenerate) {
  const int j = static_cast<int>(log_weights.size());
  if (degenerate) *degenerate = false;
  std::vector<double> logs(j);
  for (int k = 0; k < j; ++k)
    logs[k] = log_weights[k] - 0.5 * d_squared[k] - 0.5 * log_dets[k];
  const double lse = log_sum_exp(logs);
  Vector p(j);
  if (!std::isfinite(lse)) {
    if (degenerate) *degenerate = true;
    p.setConstant(1.0 / j);
    return p;
  }
  for (int k = 0; k < j; ++k) p(k) = std::exp(logs[k] - lse);
  return p;
}

Vector posterior(const Gmm& gmm, const Vector& u, bool* degenerate) {
  if (gmm.empty()) throw InvalidModel("mixture has no components");
  const int j = gmm.size();
  std::vector<double> lw(j), d2(j), ld(j);
  for (int k = 0; k < j; ++k) {
    ComponentEval ev(gmm.components[k]);
    lw[k] = std::log(gmm.components[k].weight);
    d2[k] = ev.mahalanobis_sq(u);
    ld[k] = ev.log_det();
  }
  return posterior_from_distances(lw, d2, ld, degenerate);
}

BlockView block_view(const GaussianComponent& comp, int num_participants) {
  const int m = num_participants;
  if (comp.dimension() != 2 * m)
    throw std::invalid_argument("component dimension is not 2M");
  BlockView v;
  v.a_block = comp.covariance.topLeftCorner(m, m);
  v.b_block = comp.covariance.topRightCorner(m, m);
  v.c_block = comp.covariance.bottomRightCorner(m, m);
  auto llt = cholesky_with_jitter(v.c_block);
  v.c_inverse = llt.solve(Matrix::Identity(m, m));
  return v;
}

std::vector<std::vector<ConditionalParams>> condition_centralized(
    const Gmm& gmm, const Vector& y0) {
  gmm.validate();
  const int m_count = gmm.num_participants();
  if (y0.size() != m_count)
    throw std::invalid_argument("conditioning vector must have length M");
  const int j_count = gmm.size();

  // alpha: weights re-scored by the forecast-block density of y0.
  std::vector<double> log_alpha(j_count);
  std::vector<BlockView> blocks;
  blocks.reserve(j_count);
  for (int j = 0; j < j_count; ++j) {
    const auto& comp = gmm.components[j];
    blocks.push_back(block_view(comp, m_count));
    Vector mu_y = comp.mean.tail(m_count);
    ComponentEval ev(mu_y, blocks[j].c_block);
    log_alpha[j] = std::log(comp.weight) + ev.log_density(y0);
  }
  const double lse = log_sum_exp(log_alpha);

  std::vector<std::vector<ConditionalParams>> out(
      m_count, std::vector<ConditionalParams>(j_count));
  for (int j = 0; j < j_count; ++j) {
    const auto& comp = gmm.components[j];
    const auto& blk = blocks[j];
    const double alpha =
        std::isfinite(lse) ? std::exp(log_alpha[j] - lse) : 1.0 / j_count;
    Vector dy = y0 - comp.mean.tail(m_count);
    Vector cinv_dy = blk.c_inverse * dy;
    for (int m = 0; m < m_count; ++m) {
      Vector b = blk.b_row(m);
      ConditionalParams p;
      p.alpha = alpha;
      p.lambda = comp.mean(m) + b.dot(cinv_dy);
      p.delta = blk.a_block(m, m) - b.dot(blk.c_inverse * b);
      out[m][j] = p;
    }
  }
  return out;
}

Gmm conditional_to_gmm1d(const std::vector<ConditionalParams>& params,
                         double y0_m) {
  Gmm g;
  g.dimension = 1;
  for (const auto& p : params) {
    GaussianComponent c;
    c.weight = p.alpha;
    c.mean = Vector::Constant(1, p.lambda - y0_m);
    c.covariance = Matrix::Constant(1, 1, p.delta);
    g.components.push_back(std::move(c));
  }
  return g;
}

Gmm marginal(const Gmm& gmm, const std::vector<int>& dims) {
  gmm.validate();
  if (dims.empty()) throw std::invalid_argument("empty dimension set");
  for (int d : dims)
    if (d < 0 || d >= gmm.dimension)
      throw std::invalid_argument("marginal dimension out of range");
  const int k = static_cast<int>(dims.size());
  Gmm out;
  out.dimension = k;
  for (const auto& c : gmm.components) {
    GaussianComponent r;
    r.weight = c.weight;
    r.accumulator = c.accumulator;
    r.mean = Vector(k);
    r.covariance = Matrix(k, k);
    for (int a = 0; a < k; ++a) {
      r.mean(a) = c.mean(dims[a]);
      for (int b = 0; b < k; ++b) r.covariance(a, b) = c.covariance(dims[a], dims[b]);
    }
    out.components.push_back(std::move(r));
  }
  return out;
}

Vector pdf_1d(const Gmm& one_d, const Vector& grid) {
  if (one_d.dimension != 1) throw std::invalid_argument("mixture is not 1-D");
  one_d.validate();
  Vector out = Vector::Zero(grid.size());
  for (const auto& c : one_d.components) {
    const double mu = c.mean(0);
    const double var = c.covariance(0, 0);
    if (!(var > 0.0)) throw DegenerateCovariance("non-positive 1-D variance");
    const double norm = c.weight / std::sqrt(2.0 * M_PI * var);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double d = grid(i) - mu;
      out(i) += norm * std::exp(-0.5 * d * d / var);
    }
  }
  return out;
}

Vector cdf_1d(const Gmm& one_d, const Vector& grid) {
  if (one_d.dimension != 1) throw std::invalid_argument("mixture is not 1-D");
  one_d.validate();
  Vector out = Vector::Zero(grid.size());
  for (const auto& c : one_d.components) {
    const double mu = c.mean(0);
    const double sd = std::sqrt(c.covariance(0, 0));
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      out(i) += c.weight * 0.5 * (1.0 + std::erf((grid(i) - mu) / (sd * M_SQRT2)));
  }
  return out;
}

Matrix sample(const Gmm& gmm, int n, std::uint64_t seed) {
  gmm.validate();
  std::mt19937_64 rng(seed);
  std::vector<double> w;
  for (const auto& c : gmm.components) w.push_back(c.weight);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<Matrix> l_factors;
  for (const auto& c : gmm.components)
    l_factors.push_back(Matrix(cholesky_with_jitter(c.covariance).matrixL()));

  Matrix out(n, gmm.dimension);
  Vector z(gmm.dimension);
  for (int i = 0; i < n; ++i) {
    const int j = pick(rng);
    for (int d = 0; d < gmm.dimension; ++d) z(d) = unit(rng);
    out.row(i) = (gmm.components[j].mean + l_factors[j] * z).transpose();
  }
  return out;
}

void bootstrap_accumulators(Gmm& gmm, double n_hist) {
  if (!(n_hist > 0.0)) throw std::invalid_argument("n_hist must be positive");
  for (auto& c : gmm.components) c.accumulator = c.weight * n_hist;
}

}  // namespace digmm
