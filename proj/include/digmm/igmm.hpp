#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "digmm/gmm.hpp"

namespace digmm::igmm {

// Point-wise incremental GMM configuration. `beta` is the significance level
// of the chi-squared novelty test on 2M degrees of freedom. A new component
// starts with covariance Delta_ini = s_ini^2 * I unless a full matrix is
// supplied.
struct Config {
  double beta = 0.01;
  double s_ini = 0.1;
  std::optional<Matrix> initial_covariance;
  int max_components = 0;  // 0 = unlimited
  enum class OnCapacity { Error, ReplaceLeastAccumulator };
  OnCapacity on_capacity = OnCapacity::Error;
};

enum class StepKind { Updated, Created };

struct StepOutcome {
  StepKind kind = StepKind::Updated;
  std::vector<double> d_squared;  // per existing component, from the judgment
  Vector posterior_used;          // empty when Created
};

// Regularized lower incomplete gamma P(a, x), series/continued-fraction.
double regularized_lower_gamma(double a, double x);

// Quantile q with P(dof/2, q/2) = prob, bracketed bisection to 1e-12.
double chi2_quantile(int dof, double prob);

// Resolves the preset covariance of a freshly created component.
Matrix initial_covariance(const Config& cfg, int dimension);

// s_ini heuristic: a tenth of the per-dimension data range, averaged over
// dimensions.
double s_ini_from_data(const Matrix& data);

// Novelty judgment: accepted iff some component's squared Mahalanobis
// distance is within the chi-squared threshold (ties accept). Returns all
// distances for reuse by the update.
std::pair<bool, std::vector<double>> judge(const Gmm& gmm, const Vector& u,
                                           const Config& cfg);

// Robbins-Monro update of every component with posterior weights computed
// from the cached distances.
Gmm update(const Gmm& gmm, const Vector& u,
           const std::vector<double>& d_squared,
           Vector* posterior_out = nullptr);

// Appends a component centered at the observation with the preset covariance
// and unit accumulator; weights renormalize through h_j / sum h.
Gmm create(const Gmm& gmm, const Vector& u, const Config& cfg);

// judge, then update or create.
std::pair<Gmm, StepOutcome> step(const Gmm& gmm, const Vector& u,
                                 const Config& cfg);

}  // namespace digmm::igmm
