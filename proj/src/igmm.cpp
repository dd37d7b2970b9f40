#include "digmm/igmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace digmm::igmm {

namespace {

// Series expansion of P(a,x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NonConvergence("incomplete gamma series did not converge", del);
}

// Lentz continued fraction for Q(a,x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NonConvergence("incomplete gamma continued fraction did not converge",
                       h);
}

}  // namespace

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::invalid_argument("regularized_lower_gamma domain");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi2_quantile(int dof, double prob) {
  if (dof < 1) throw std::invalid_argument("dof must be >= 1");
  if (!(prob > 0.0 && prob < 1.0))
    throw std::invalid_argument("prob must lie in (0,1)");
  const double a = 0.5 * dof;

  double lo = 0.0;
  double hi = dof + 10.0 * std::sqrt(2.0 * dof) + 10.0;
  while (regularized_lower_gamma(a, 0.5 * hi) < prob) {
    hi *= 2.0;
    if (hi > 1e9) throw NonConvergence("chi2 quantile bracket failed", hi);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_lower_gamma(a, 0.5 * mid) < prob)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

Matrix initial_covariance(const Config& cfg, int dimension) {
  if (cfg.initial_covariance) {
    const Matrix& m = *cfg.initial_covariance;
    if (m.rows() != dimension || m.cols() != dimension)
      throw std::invalid_argument("initial covariance has wrong shape");
    cholesky_with_jitter(m);  // must be PD
    return m;
  }
  if (!(cfg.s_ini > 0.0)) throw std::invalid_argument("s_ini must be positive");
  return cfg.s_ini * cfg.s_ini * Matrix::Identity(dimension, dimension);
}

double s_ini_from_data(const Matrix& data) {
  if (data.rows() < 2) throw std::invalid_argument("need at least two rows");
  const Vector range =
      data.colwise().maxCoeff() - data.colwise().minCoeff();
  return 0.1 * range.mean();
}

std::pair<bool, std::vector<double>> judge(const Gmm& gmm, const Vector& u,
                                           const Config& cfg) {
  gmm.validate();
  if (u.size() != gmm.dimension)
    throw std::invalid_argument("observation dimension mismatch");
  const double threshold = chi2_quantile(gmm.dimension, 1.0 - cfg.beta);
  std::vector<double> d2(gmm.size());
  bool accepted = false;
  for (int j = 0; j < gmm.size(); ++j) {
    d2[j] = ComponentEval(gmm.components[j]).mahalanobis_sq(u);
    if (d2[j] <= threshold) accepted = true;
  }
  return {accepted, d2};
}

Gmm update(const Gmm& gmm, const Vector& u,
           const std::vector<double>& d_squared, Vector* posterior_out) {
  if (static_cast<int>(d_squared.size()) != gmm.size())
    throw std::invalid_argument("distance vector length mismatch");
  const int j_count = gmm.size();
  std::vector<double> lw(j_count), ld(j_count);
  for (int j = 0; j < j_count; ++j) {
    lw[j] = std::log(gmm.components[j].weight);
    ld[j] = ComponentEval(gmm.components[j]).log_det();
  }
  const Vector p = posterior_from_distances(lw, d_squared, ld);
  if (posterior_out) *posterior_out = p;

  Gmm out = gmm;
  double h_total = 0.0;
  for (int j = 0; j < j_count; ++j) {
    auto& c = out.components[j];
    const double h_new = c.accumulator + p(j);
    const double r = p(j) / h_new;
    const Vector mu_old = c.mean;
    c.mean = mu_old + r * (u - mu_old);
    // (1-r)*Sigma + r*e e' - dmu dmu' with e = u - mu_new, dmu = r*(u - mu_old)
    const Vector e = u - c.mean;
    const Vector dmu = r * (u - mu_old);
    c.covariance = (1.0 - r) * c.covariance + r * (e * e.transpose()) -
                   dmu * dmu.transpose();
    c.accumulator = h_new;
    h_total += h_new;
  }
  for (auto& c : out.components) c.weight = c.accumulator / h_total;
  return out;
}

Gmm create(const Gmm& gmm, const Vector& u, const Config& cfg) {
  Gmm out = gmm;
  if (out.dimension == 0) out.dimension = static_cast<int>(u.size());
  if (u.size() != out.dimension)
    throw std::invalid_argument("observation dimension mismatch");
  if (cfg.max_components > 0 && out.size() >= cfg.max_components) {
    if (cfg.on_capacity == Config::OnCapacity::Error)
      throw CapacityExceeded("component cap reached");
    auto least = std::min_element(
        out.components.begin(), out.components.end(),
        [](const auto& a, const auto& b) { return a.accumulator < b.accumulator; });
    out.components.erase(least);
  }
  GaussianComponent fresh;
  fresh.mean = u;
  fresh.covariance = initial_covariance(cfg, out.dimension);
  fresh.accumulator = 1.0;
  out.components.push_back(std::move(fresh));

  double h_total = 0.0;
  for (const auto& c : out.components) h_total += c.accumulator;
  for (auto& c : out.components) c.weight = c.accumulator / h_total;
  return out;
}

std::pair<Gmm, StepOutcome> step(const Gmm& gmm, const Vector& u,
                                 const Config& cfg) {
  auto [accepted, d2] = judge(gmm, u, cfg);
  StepOutcome outcome;
  outcome.d_squared = d2;
  if (accepted) {
    outcome.kind = StepKind::Updated;
    Gmm next = update(gmm, u, d2, &outcome.posterior_used);
    return {std::move(next), std::move(outcome)};
  }
  outcome.kind = StepKind::Created;
  return {create(gmm, u, cfg), std::move(outcome)};
}

}  // namespace digmm::igmm
