#pragma once

#include <stdexcept>
#include <string>

namespace fracest {

/// Bad argument, malformed input file or violated precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested order lies outside the range where the estimator's
/// variance theory holds (alpha >= 1/2), or q outside the L_q regime.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature, factorization or convergence failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A covariance matrix could not be factorized even after jitter escalation.
class KernelNotPsd : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracest
