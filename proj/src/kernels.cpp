#include "digmm/kernels.hpp"

#include <cmath>
#include <random>

namespace digmm::kernels {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr int kChunk = 1024;

void density_row(const Matrix& data, const MixturePrep& prep, Eigen::Index n,
                 Matrix& out) {
  Vector y(prep.dimension);
  for (int j = 0; j < prep.size(); ++j) {
    y = data.row(n).transpose() - prep.mean[j];
    prep.l_factor[j].triangularView<Eigen::Lower>().solveInPlace(y);
    out(n, j) = prep.log_norm[j] - 0.5 * y.squaredNorm();
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over seed xor stream; cheap decorrelated per-chunk streams.
  std::uint64_t z = seed ^ (stream * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct JsPrep {
  MixturePrep p;
  MixturePrep q;
  std::vector<Matrix> blend_l;              // factors for sampling the blend
  std::vector<const GaussianComponent*> blend_comp;
  std::vector<double> blend_w;

  JsPrep(const Gmm& gp, const Gmm& gq) : p(gp), q(gq) {
    for (const Gmm* g : {&gp, &gq})
      for (const auto& c : g->components) {
        blend_comp.push_back(&c);
        blend_w.push_back(0.5 * c.weight);
        blend_l.push_back(Matrix(cholesky_with_jitter(c.covariance).matrixL()));
      }
  }
};

double log_mixture(const MixturePrep& prep, const Vector& u) {
  double mx = -std::numeric_limits<double>::infinity();
  Vector y(prep.dimension);
  std::vector<double> terms(prep.size());
  for (int j = 0; j < prep.size(); ++j) {
    y = u - prep.mean[j];
    prep.l_factor[j].triangularView<Eigen::Lower>().solveInPlace(y);
    terms[j] = prep.log_norm[j] - 0.5 * y.squaredNorm();
    mx = std::max(mx, terms[j]);
  }
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

// Sum over one chunk of the pointwise JS integrand under blend samples.
double js_chunk(const JsPrep& prep, int count, std::uint64_t chunk_seed) {
  std::mt19937_64 rng(chunk_seed);
  std::discrete_distribution<int> pick(prep.blend_w.begin(),
                                       prep.blend_w.end());
  std::normal_distribution<double> unit(0.0, 1.0);
  const int dim = prep.p.dimension;
  Vector z(dim), u(dim);
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    const int k = pick(rng);
    for (int d = 0; d < dim; ++d) z(d) = unit(rng);
    u = prep.blend_comp[k]->mean + prep.blend_l[k] * z;
    const double lp = log_mixture(prep.p, u);
    const double lq = log_mixture(prep.q, u);
    // m = (p+q)/2 in log space
    const double mx = std::max(lp, lq);
    const double lm = mx + std::log(0.5 * (std::exp(lp - mx) + std::exp(lq - mx)));
    const double tp = std::exp(lp - lm);  // p/m
    const double tq = std::exp(lq - lm);  // q/m
    double term = 0.0;
    if (tp > 0.0) term += 0.5 * tp * std::log2(tp);
    if (tq > 0.0) term += 0.5 * tq * std::log2(tq);
    acc += term;
  }
  return acc;
}

}  // namespace

MixturePrep::MixturePrep(const Gmm& gmm) : dimension(gmm.dimension) {
  gmm.validate();
  for (const auto& c : gmm.components) {
    auto llt = cholesky_with_jitter(c.covariance);
    const double log_det =
        2.0 * llt.matrixLLT().diagonal().array().log().sum();
    l_factor.push_back(Matrix(llt.matrixL()));
    mean.push_back(c.mean);
    log_norm.push_back(std::log(c.weight) -
                       0.5 * (log_det + dimension * kLog2Pi));
  }
}

void log_weighted_densities_serial(const Matrix& data, const MixturePrep& prep,
                                   Matrix& out) {
  out.resize(data.rows(), prep.size());
  for (Eigen::Index n = 0; n < data.rows(); ++n) density_row(data, prep, n, out);
}

void log_weighted_densities_omp(const Matrix& data, const MixturePrep& prep,
                                Matrix& out) {
  out.resize(data.rows(), prep.size());
  const Eigen::Index rows = data.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index n = 0; n < rows; ++n) density_row(data, prep, n, out);
}

void log_weighted_densities(const Matrix& data, const MixturePrep& prep,
                            Matrix& out, bool parallel) {
  if (parallel)
    log_weighted_densities_omp(data, prep, out);
  else
    log_weighted_densities_serial(data, prep, out);
}

double js_mc_serial(const Gmm& p, const Gmm& q, int samples,
                    std::uint64_t seed) {
  if (p.dimension != q.dimension)
    throw std::invalid_argument("mixtures must share dimension");
  JsPrep prep(p, q);
  const int chunks = (samples + kChunk - 1) / kChunk;
  double total = 0.0;
  for (int c = 0; c < chunks; ++c) {
    const int count = std::min(kChunk, samples - c * kChunk);
    total += js_chunk(prep, count, mix_seed(seed, c));
  }
  return total / samples;
}

double js_mc_omp(const Gmm& p, const Gmm& q, int samples, std::uint64_t seed) {
  if (p.dimension != q.dimension)
    throw std::invalid_argument("mixtures must share dimension");
  JsPrep prep(p, q);
  const int chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> partial(chunks);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < chunks; ++c) {
    const int count = std::min(kChunk, samples - c * kChunk);
    partial[c] = js_chunk(prep, count, mix_seed(seed, c));
  }
  double total = 0.0;
  for (double t : partial) total += t;  // fixed merge order
  return total / samples;
}

double js_mc(const Gmm& p, const Gmm& q, int samples, std::uint64_t seed,
             bool parallel) {
  return parallel ? js_mc_omp(p, q, samples, seed)
                  : js_mc_serial(p, q, samples, seed);
}

}  // namespace digmm::kernels
