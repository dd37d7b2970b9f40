#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "digmm/errors.hpp"

namespace digmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One Gaussian component of the joint mixture. For a joint model over M
// participants the layout of mean/covariance is [x_1..x_M, y_1..y_M]
// (powers first, forecasts second). `accumulator` is the running posterior
// mass h_j that defines weights and incremental gains.
struct GaussianComponent {
  double weight = 1.0;
  Vector mean;
  Matrix covariance;
  double accumulator = 0.0;

  int dimension() const { return static_cast<int>(mean.size()); }
};

// Gaussian mixture. `dimension` is authoritative; joint models over M
// participants have dimension == 2*M, but marginals and 1-D conditionals
// reuse the same type with their own dimension.
struct Gmm {
  std::vector<GaussianComponent> components;
  int dimension = 0;

  int size() const { return static_cast<int>(components.size()); }
  int num_participants() const { return dimension / 2; }
  bool empty() const { return components.empty(); }

  // Throws InvalidModel unless all components share `dimension` and the
  // weights form a simplex within 1e-10.
  void validate() const;
};

// Cholesky factorization with the graded jitter repair used everywhere a
// covariance is factored: on failure add eps*(trace/n)*I with eps from 1e-10
// escalating tenfold to 1e-6, then give up with DegenerateCovariance.
class ComponentEval {
 public:
  explicit ComponentEval(const GaussianComponent& comp)
      : ComponentEval(comp.mean, comp.covariance) {}
  ComponentEval(const Vector& mean, const Matrix& covariance);

  double mahalanobis_sq(const Vector& u) const;
  double log_density(const Vector& u) const;  // log N(u; mean, covariance)
  double log_det() const { return log_det_; }
  double jitter_used() const { return jitter_; }
  const Eigen::LLT<Matrix>& llt() const { return llt_; }
  const Vector& mean() const { return mean_; }

  // Solves covariance * X = I via the factorization (explicit inverse, used
  // where the element-wise decompositions need individual entries).
  Matrix inverse() const;

 private:
  Vector mean_;
  Eigen::LLT<Matrix> llt_;
  double log_det_ = 0.0;
  double jitter_ = 0.0;
};

// Factors `covariance` under the jitter policy. Returns the LLT and reports
// the jitter that was needed (0 when none).
Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& covariance,
                                        double* jitter_used = nullptr);

double component_log_density(const GaussianComponent& comp, const Vector& u);
double component_density(const GaussianComponent& comp, const Vector& u);

double mixture_log_density(const Gmm& gmm, const Vector& u);
double mixture_density(const Gmm& gmm, const Vector& u);

double mahalanobis_sq(const GaussianComponent& comp, const Vector& u);

// Posterior responsibilities p(j|u). When every term degenerates (all -inf)
// the result is uniform and *degenerate is set.
Vector posterior(const Gmm& gmm, const Vector& u, bool* degenerate = nullptr);

// Posterior from cached squared distances: softmax over
// log w_j - d2_j/2 - log_det_j/2. Shared constants cancel. This is the form
// the distributed path evaluates at every node from consensus outputs.
Vector posterior_from_distances(const std::vector<double>& log_weights,
                                const std::vector<double>& d_squared,
                                const std::vector<double>& log_dets,
                                bool* degenerate = nullptr);

// Block partition of a joint component's covariance:
//   Sigma = [ A  B ]   A: power-power, B: power-forecast, C: forecast-forecast
//           [ B' C ]
// plus the explicit inverse of C whose entries drive the per-node derivation.
struct BlockView {
  Matrix a_block;
  Matrix b_block;
  Matrix c_block;
  Matrix c_inverse;

  // Row b_{j,m}: covariance of participant m's power with all forecasts.
  Vector b_row(int m) const { return b_block.row(m); }
};

BlockView block_view(const GaussianComponent& comp, int num_participants);

// Per-participant conditional parameters of the forecast-error mixture:
// alpha weights the component, lambda is the conditional mean of x_m and
// delta its conditional (Schur-complement) variance.
struct ConditionalParams {
  double alpha = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
};

// Centralized conditioning of the joint mixture on the full forecast vector
// y0. Result indexed [participant][component]. Oracle for the distributed
// derivation.
std::vector<std::vector<ConditionalParams>> condition_centralized(
    const Gmm& gmm, const Vector& y0);

// 1-D mixture of the forecast error z_m = x_m - y0_m: component means are
// lambda_{j,m} - y0_m, variances delta_{j,m}, weights alpha_{j,m}.
Gmm conditional_to_gmm1d(const std::vector<ConditionalParams>& params,
                         double y0_m);

// Keeps the listed dimensions (0-based), same weights.
Gmm marginal(const Gmm& gmm, const std::vector<int>& dims);

// pdf/cdf of a 1-D mixture on a sorted grid. cdf uses the Gaussian error
// function per component.
Vector pdf_1d(const Gmm& one_d, const Vector& grid);
Vector cdf_1d(const Gmm& one_d, const Vector& grid);

// Deterministic sampling (component choice + Cholesky transform), one row
// per draw.
Matrix sample(const Gmm& gmm, int n, std::uint64_t seed);

// Sets h_j = w_j * n_hist, the accumulator state an EM-fitted model would
// have carried had it been built by n_hist incremental absorptions.
void bootstrap_accumulators(Gmm& gmm, double n_hist);

}  // namespace digmm
