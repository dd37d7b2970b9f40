#pragma once

#include <cstdint>

#include "digmm/dataio.hpp"
#include "digmm/gmm.hpp"

namespace digmm::metrics {

enum class JsMethod { Grid1d, MonteCarlo };

// Jensen-Shannon divergence, base-2 logs (bounded by 1). Grid1d integrates
// 1-D mixtures on `resolution` points spanning the combined mean +- 6 sigma
// support; MonteCarlo samples `resolution` points from the equal blend.
double js_divergence(const Gmm& p, const Gmm& q, JsMethod method,
                     int resolution, std::uint64_t seed = 0,
                     bool parallel = true);

// Relative standard error in percent: sqrt(sum (a-b)^2 / sum b^2) * 100,
// with b the benchmark curve.
double rse(const Vector& curve, const Vector& benchmark);

// Kernel-weighted empirical distribution of one site's forecast error under
// a given forecast vector. Weight of row i is the Gaussian kernel of
// |forecast_row_i - y0| with the per-dimension bandwidth.
struct WeightedEcdf {
  Vector z;           // sorted error samples
  Vector cum_weight;  // normalized cumulative weights
  double effective_sample_size = 0.0;

  double eval(double x) const;
  Vector eval(const Vector& grid) const;
};

WeightedEcdf empirical_conditional(const dataio::Dataset& data,
                                   const Vector& y0, int site,
                                   double bandwidth);

// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct TimingSummary {
  double min_s = 0.0;
  double max_s = 0.0;
  double mean_s = 0.0;
  double trend = 0.0;  // Spearman correlation with the update index
};

TimingSummary timing_report(const std::vector<double>& seconds);

}  // namespace digmm::metrics
