#pragma once

#include <vector>

#include "fracest/rng.hpp"

namespace fracest {

/// Draws N(0, C) vectors through a lower Cholesky factor of C. When C is
/// only semidefinite a diagonal jitter, relative to max C_ii, is added and
/// escalated 1e-12 -> 1e-8; failure after that throws KernelNotPsd.
class GaussianSampler {
 public:
  /// `cov` is dim x dim, row-major.
  GaussianSampler(const std::vector<double>& cov, std::size_t dim);

  std::size_t dim() const { return dim_; }
  double jitter() const { return jitter_; }
  const std::vector<double>& lower() const { return lower_; }
  void sample(Philox& rng, std::vector<double>& out) const;

 private:
  std::size_t dim_;
  double jitter_ = 0.0;
  std::vector<double> lower_;  // row-major, lower triangle used
};

/// Smallest eigenvalue of a symmetric row-major matrix.
double min_eigenvalue(const std::vector<double>& sym, std::size_t dim);

}  // namespace fracest
