#include "digmm/em.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "digmm/kernels.hpp"

namespace digmm::em {

namespace {

constexpr double kMinClusterMass = 1e-6;

// k-means++ seeding followed by a few Lloyd iterations; returns centers.
std::vector<Vector> kmeans_centers(const Matrix& data, int k,
                                   std::mt19937_64& rng) {
  const Eigen::Index n = data.rows();
  std::uniform_int_distribution<Eigen::Index> pick_row(0, n - 1);
  std::vector<Vector> centers;
  centers.push_back(data.row(pick_row(rng)).transpose());
  Vector dist2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (data.row(i).transpose() - centers.back()).squaredNorm();
      dist2(i) = std::min(dist2(i), d);
    }
    std::discrete_distribution<Eigen::Index> pick(dist2.data(),
                                                  dist2.data() + n);
    centers.push_back(data.row(pick(rng)).transpose());
  }

  std::vector<int> assign(n, 0);
  for (int iter = 0; iter < 25; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (data.row(i).transpose() - centers[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    for (int c = 0; c < k; ++c) {
      Vector sum = Vector::Zero(data.cols());
      int count = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (assign[i] == c) {
          sum += data.row(i).transpose();
          ++count;
        }
      if (count > 0) centers[c] = sum / count;
    }
    if (!changed) break;
  }
  return centers;
}

Gmm init_model(const Matrix& data, const Config& cfg, std::mt19937_64& rng) {
  const Eigen::Index n = data.rows();
  const int d = static_cast<int>(data.cols());
  const int k = cfg.num_components;

  Matrix resp(n, k);
  if (cfg.init == Config::Init::KMeans) {
    auto centers = kmeans_centers(data, k, rng);
    resp.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double dd = (data.row(i).transpose() - centers[c]).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      resp(i, best) = 1.0;
    }
  } else {
    std::gamma_distribution<double> g(1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      double row_sum = 0.0;
      for (int c = 0; c < k; ++c) {
        resp(i, c) = g(rng);
        row_sum += resp(i, c);
      }
      resp.row(i) /= row_sum;
    }
  }

  // M-step on the initial responsibilities.
  Gmm model;
  model.dimension = d;
  const Vector nk = resp.colwise().sum();
  for (int c = 0; c < k; ++c) {
    if (nk(c) < kMinClusterMass) throw InsufficientData("empty cluster");
    GaussianComponent comp;
    comp.weight = nk(c) / static_cast<double>(n);
    comp.mean = (resp.col(c).transpose() * data).transpose() / nk(c);
    Matrix cov = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector diff = data.row(i).transpose() - comp.mean;
      cov.noalias() += resp(i, c) * (diff * diff.transpose());
    }
    comp.covariance = cov / nk(c);
    cholesky_with_jitter(comp.covariance);  // PD or repairable, else throw
    model.components.push_back(std::move(comp));
  }
  return model;
}

}  // namespace

FitResult fit(const Matrix& data, const Config& cfg) {
  if (cfg.num_components < 1)
    throw std::invalid_argument("need at least one component");
  if (data.rows() <= cfg.num_components)
    throw InsufficientData("fewer rows than components");
  if (!data.allFinite()) throw DataFormatError("non-finite training data");

  const Eigen::Index n = data.rows();
  const int k = cfg.num_components;

  Gmm model;
  std::mt19937_64 rng(cfg.seed);
  for (int attempt = 0;; ++attempt) {
    try {
      model = init_model(data, cfg, rng);
      break;
    } catch (const InsufficientData&) {
      if (attempt >= 4) throw;
    }
  }

  FitResult result;
  Matrix logd;
  Matrix resp(n, k);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    // E-step
    kernels::MixturePrep prep(model);
    kernels::log_weighted_densities(data, prep, logd, cfg.parallel);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = logd.row(i).maxCoeff();
      double s = 0.0;
      for (int c = 0; c < k; ++c) s += std::exp(logd(i, c) - mx);
      const double lse = mx + std::log(s);
      ll += lse;
      for (int c = 0; c < k; ++c) resp(i, c) = std::exp(logd(i, c) - lse);
    }
    result.log_likelihood_trace.push_back(ll);
    result.iterations = iter + 1;

    // M-step
    const Vector nk = resp.colwise().sum();
    for (int c = 0; c < k; ++c) {
      auto& comp = model.components[c];
      const double mass = std::max(nk(c), kMinClusterMass);
      comp.weight = nk(c) / static_cast<double>(n);
      comp.mean = (resp.col(c).transpose() * data).transpose() / mass;
      Matrix cov = Matrix::Zero(model.dimension, model.dimension);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Vector diff = data.row(i).transpose() - comp.mean;
        cov.noalias() += resp(i, c) * (diff * diff.transpose());
      }
      comp.covariance = cov / mass;
    }
    double wsum = 0.0;
    for (const auto& c : model.components) wsum += c.weight;
    for (auto& c : model.components) c.weight /= wsum;

    if (iter > 0 && std::abs(ll - prev_ll) <= cfg.tolerance * (1.0 + std::abs(ll)))
      break;
    prev_ll = ll;
  }
  result.model = std::move(model);
  return result;
}

RefitTiming time_refit(const Matrix& history, const Matrix& new_points,
                       const Config& cfg, int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  RefitTiming timing;
  const Eigen::Index cols = history.cols();
  for (Eigen::Index t = 0; t < new_points.rows(); t += stride) {
    Matrix grown(history.rows() + t + 1, cols);
    grown.topRows(history.rows()) = history;
    grown.bottomRows(t + 1) = new_points.topRows(t + 1);
    const auto start = std::chrono::steady_clock::now();
    fit(grown, cfg);
    const auto stop = std::chrono::steady_clock::now();
    timing.update_index.push_back(static_cast<int>(t));
    timing.seconds.push_back(
        std::chrono::duration<double>(stop - start).count());
  }
  return timing;
}

}  // namespace digmm::em
