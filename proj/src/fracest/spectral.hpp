#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracest/fraccalc.hpp"
#include "fracest/mc.hpp"
#include "fracest/rng.hpp"

namespace fracest {

/// Spectral density on [0, 2 pi] of a centered stationary Gaussian
/// sequence, with r(m) = int_0^{2 pi} cos(m l) f(l) dl.
class SpectralModel {
 public:
  enum class Kind { White, Ar1 };

  static SpectralModel white();
  /// f(l) = (1 - rho^2) / (2 pi (1 - 2 rho cos l + rho^2)), r(m) = rho^|m|.
  static SpectralModel ar1(double rho);
  /// "white" or "ar1:RHO".
  static SpectralModel parse(const std::string& spec);

  Kind kind() const { return kind_; }
  double rho() const { return rho_; }
  std::string name() const;
  double density(double lambda) const;
  double covariance(long m) const;

 private:
  SpectralModel(Kind kind, double rho) : kind_(kind), rho_(rho) {}
  Kind kind_;
  double rho_;
};

/// Exact sampler of (eta_1..eta_n) by circulant embedding. The embedding
/// size starts at the first power of two >= 2(n - 1) and doubles until the
/// circulant is PSD or exceeds 16 n; then a dense Cholesky factor is used
/// for n <= 4096.
class SeriesGenerator {
 public:
  SeriesGenerator(const SpectralModel& model, std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t embedding_size() const { return m_; }
  bool dense() const { return dense_; }
  void generate(Philox& rng, std::vector<double>& out) const;

 private:
  std::size_t n_;
  std::size_t m_ = 0;
  bool dense_ = false;
  std::vector<double> sqrt_eig_;
  std::vector<double> lower_;
};

struct GaussianSeries {
  std::vector<double> values;
  std::string model;
  std::uint64_t seed = 0;
};

GaussianSeries generate_series(const SpectralModel& model, std::size_t n, std::uint64_t seed);

/// J_n(l_j) = |sum_k exp(i k l_j) eta_k|^2 / (2 pi n) at l_j = 2 pi j / n.
GridFunction periodogram(const std::vector<double>& series);

/// lambda_j = lambda_max j / M, j = 1..M.
std::vector<double> default_lambda_grid(std::size_t points, double lambda_max);

struct SpectralEstimate {
  std::vector<double> lambda_grid;
  std::vector<double> values;
  double band_halfwidth = 0.0;
};

/// I^(1-a) of the periodogram held constant on Fourier bins centred at
/// l_j (width 2 pi / n; the bin of l_0 wraps around 2 pi).
std::vector<double> spectral_estimate_values(const GridFunction& periodogram, const FractionalOrder& order,
                                             const std::vector<double>& lambda_grid);
SpectralEstimate estimate_spectral_frac_derivative(const std::vector<double>& series, const FractionalOrder& order,
                                                   const std::vector<double>& lambda_grid);

/// D^a F(l) = I^(1-a) f(l).
double spectral_truth(const SpectralModel& model, const FractionalOrder& order, double lambda);
/// E J_n(l_j) from the Fejer-weighted covariances.
std::vector<double> expected_periodogram(const SpectralModel& model, std::size_t n);
/// Exact expectation of the estimator at each lambda.
std::vector<double> expected_estimate(const SpectralModel& model, const FractionalOrder& order, std::size_t n,
                                      const std::vector<double>& lambda_grid);

/// (4 pi / Gamma^2(1-a)) int_0^{l ^ m} f^2(v) (l - v)^-a (m - v)^-a dv.
double theta_covariance(const SpectralModel& model, const FractionalOrder& order, double l1, double l2);

/// Limit of n Cov(F_n(l1), F_n(l2)) for Gaussian data:
/// (2 pi / Gamma^2(1-a)) int k_l1(v) [k_l2(v) + k_l2(2 pi - v)] f^2(v) dv,
/// k_l(v) = (l - v)^-a I(v < l). Half of theta_covariance for l1, l2 <= pi.
double theta_limit_covariance(const SpectralModel& model, const FractionalOrder& order, double l1, double l2);

enum class ThetaVariant { Nominal, Limit };

struct Band {
  std::vector<double> lambda_grid;
  double u0 = 0.0;
  double halfwidth = 0.0;
  double sigma2_max = 0.0;
  double level = 0.95;
  ThetaVariant variant = ThetaVariant::Limit;
};

/// u0 = level-quantile of max_l |zeta(l)| for the Gaussian process with the
/// chosen Theta covariance on the grid; halfwidth u0 / sqrt(n).
Band uniform_confidence_band(const SpectralModel& model, const FractionalOrder& order, std::size_t n, double level,
                             const std::vector<double>& lambda_grid, ThetaVariant variant, const McConfig& cfg);

/// int_0^l J~^2(v) (l - v)^(2a-1) dv / Gamma(2a), J~ the binned periodogram.
double plugin_I2alpha_f2(const GridFunction& periodogram, const FractionalOrder& order, double lambda);
/// I^(2a)[f^2](l).
double i2alpha_f2_truth(const SpectralModel& model, const FractionalOrder& order, double lambda);

}  // namespace fracest
