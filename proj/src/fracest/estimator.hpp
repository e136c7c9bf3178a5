#pragma once

#include <cstdint>
#include <vector>

#include "fracest/fraccalc.hpp"
#include "fracest/laws.hpp"

namespace fracest {

/// Nonnegative observations.
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool sorted() const { return sorted_; }

 private:
  std::vector<double> values_;
  bool sorted_ = false;
};

struct PointEstimate {
  double value = 0.0;
  double variance = 0.0;
  double stderr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  /// The plug-in variance came out negative and was set to 0.
  bool variance_clamped = false;
};

struct Sigma2 {
  double value = 0.0;
  bool clamped = false;
};

/// n^-1 sum f_{alpha,xi}(x), i.e. Gamma(1 - alpha) times the estimate.
/// No regime check; valid for any order in (0, 1).
double summand_mean(const std::vector<double>& xs, double x, double alpha);

/// Unbiased estimate of D^alpha G(x). Requires alpha < 1/2.
double estimate_point(const Sample& s, double x, const FractionalOrder& order);

/// Plug-in Sigma^2_alpha(x) = 2 x^-a A - B - A^2 with A, B the Gamma-scaled
/// estimates of order alpha and 2 alpha. Negative values are clamped.
Sigma2 sigma2_alpha(const Sample& s, double x, const FractionalOrder& order);

/// Exact Sigma^2_alpha(x) for a law with closed-form derivatives.
double sigma2_alpha_exact(const ClosedForm& law, double x, const FractionalOrder& order);

PointEstimate confidence_interval(const Sample& s, double x, const FractionalOrder& order,
                                  double level = 0.95);

struct TailConfig {
  std::size_t draws = 1000000;
  std::uint64_t seed = 1;
  /// Levels to report; empty selects a geometric ladder from y = 3.
  std::vector<double> levels;
  /// Smallest level entering the slope fit.
  double fit_from = 30.0;
};

struct TailDiagnostic {
  double delta = 1.0;
  double expected_slope = 0.0;
  std::vector<double> levels;
  std::vector<double> exceedance;
  double fitted_slope = 0.0;
  double slope_ci_low = 0.0;
  double slope_ci_high = 0.0;
  std::size_t fit_points = 0;
  bool estimable = false;
};

/// Exceedance curve P(|G_{alpha,1}(x) - G^(alpha)(x)| > y) and its log-log
/// slope. Draws come from a defensive mixture in probability space, half
/// uniform and half concentrated just below F(x), with self-normalized
/// weights; the expected slope is -delta / alpha with delta the local
/// exponent of F at x.
TailDiagnostic tail_diagnostic(const ClosedForm& law, double x, const FractionalOrder& order,
                               const TailConfig& cfg);

/// y_0 = from, y_{j+1} = sqrt(2) y_j, up to 1e12.
std::vector<double> geometric_levels(double from);

/// Self-normalized exceedance sum_i w_i I(dev_i > y) / sum_i w_i at each
/// level, truncated where fewer than 50 draws exceed, and the least-squares
/// log-log slope over levels >= fit_from.
TailDiagnostic weighted_exceedance(const std::vector<double>& dev, const std::vector<double>& weight,
                                   const std::vector<double>& levels, double fit_from);

}  // namespace fracest
