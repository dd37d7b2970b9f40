#pragma once

#include <cstdint>
#include <vector>

#include "digmm/gmm.hpp"

namespace digmm::em {

struct Config {
  int num_components = 3;
  int max_iterations = 500;
  double tolerance = 1e-8;  // relative log-likelihood change
  std::uint64_t seed = 0;
  enum class Init { KMeans, RandomResponsibility };
  Init init = Init::KMeans;
  bool parallel = true;  // OpenMP E-step kernel
};

struct FitResult {
  Gmm model;
  std::vector<double> log_likelihood_trace;  // one entry per iteration
  int iterations = 0;
};

// Batch EM fit. Deterministic given (data, cfg); covariances go through the
// shared jitter policy. Empty clusters at init trigger up to 5 reseeds.
FitResult fit(const Matrix& data, const Config& cfg);

// Refit-from-scratch timing: for each sampled new point, append everything up
// to it to the history and time a full fit. `stride` subsamples the new
// points (1 = every point).
struct RefitTiming {
  std::vector<int> update_index;
  std::vector<double> seconds;
};
RefitTiming time_refit(const Matrix& history, const Matrix& new_points,
                       const Config& cfg, int stride = 1);

}  // namespace digmm::em
