#pragma once

#include <stdexcept>
#include <string>

namespace digmm {

// Covariance not positive definite even after the jitter escalation.
class DegenerateCovariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mixture in an unusable state (empty, inconsistent dimensions, ...).
class InvalidModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative procedure hit its round/iteration cap; carries the last residual.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Component cap reached while creating a new component.
class CapacityExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough effective data to produce the requested estimate.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (CSV/JSON schema, timestamps, capacities, ...).
class DataFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace digmm
