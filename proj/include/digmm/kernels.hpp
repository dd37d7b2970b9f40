#pragma once

#include <cstdint>

#include "digmm/gmm.hpp"

namespace digmm::kernels {

// Per-component factorizations shared by the density kernels so timing
// differences come from the row loop alone.
struct MixturePrep {
  std::vector<Matrix> l_factor;       // lower Cholesky factors
  std::vector<Vector> mean;
  std::vector<double> log_norm;       // log w_j - (log det + d log 2pi)/2
  int dimension = 0;

  explicit MixturePrep(const Gmm& gmm);
  int size() const { return static_cast<int>(mean.size()); }
};

// out(n, j) = log w_j + log N_j(data row n). Serial reference.
void log_weighted_densities_serial(const Matrix& data, const MixturePrep& prep,
                                   Matrix& out);

// Row-parallel OpenMP variant. Each row is computed by the same per-row
// routine as the serial kernel, so results are bitwise identical.
void log_weighted_densities_omp(const Matrix& data, const MixturePrep& prep,
                                Matrix& out);

void log_weighted_densities(const Matrix& data, const MixturePrep& prep,
                            Matrix& out, bool parallel);

// Monte-Carlo Jensen-Shannon divergence (base-2) between two mixtures of the
// same dimension, sampling from the equal-weight blend. Work is split into
// fixed-size chunks with per-chunk RNG streams and merged in chunk order, so
// serial and OpenMP variants agree bitwise for any thread count.
double js_mc_serial(const Gmm& p, const Gmm& q, int samples,
                    std::uint64_t seed);
double js_mc_omp(const Gmm& p, const Gmm& q, int samples, std::uint64_t seed);
double js_mc(const Gmm& p, const Gmm& q, int samples, std::uint64_t seed,
             bool parallel);

}  // namespace digmm::kernels
