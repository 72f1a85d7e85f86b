#pragma once

#include <stdexcept>
#include <string>

namespace ddlink {

// Bad grid geometry / matrix shape.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid user-facing configuration (pilot layout, modulation order, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Statistical model violated (covariance not PSD, powers inconsistent).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Factorization failed after ridge escalation.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

}  // namespace ddlink
