#pragma once

#include <string>

#include "fracest/fraccalc.hpp"

namespace fracest {

/// Exactly solvable laws and indicator functions used as oracles.
///
/// power_cdf(delta, c1):  F(t) = c1 t^delta on [0, c1^(-1/delta)].
/// power_cusp(delta, m):  xi = m (1 +/- U^(1/delta)) with a fair sign, so
///   |F(t) - 1/2| = |1 - t/m|^delta / 2 near m. This places the power
///   behaviour of F at the interior point m instead of at the origin.
/// indicator_survival(h), indicator_cdf(h): the point mass at h, viewed
///   through I(x < h) and I(h < x) respectively.
class ClosedForm {
 public:
  enum class Kind { IndicatorSurvival, IndicatorCdf, UniformReliability, PowerCdf, PowerCusp };

  static ClosedForm indicator_survival(double h);
  static ClosedForm indicator_cdf(double h);
  static ClosedForm uniform_reliability();
  static ClosedForm power_cdf(double delta, double c1);
  static ClosedForm power_cusp(double delta, double m);
  /// Parses "uniform", "power:D:C", "cusp:D:M", "indicator:H".
  static ClosedForm parse(const std::string& spec);

  Kind kind() const { return kind_; }
  double h() const { return p1_; }
  double delta() const { return p1_; }
  double c1() const { return p2_; }
  double center() const { return p2_; }
  std::string name() const;

  bool absolutely_continuous() const;
  /// Right end of the support.
  double support_end() const;
  double cdf(double x) const;
  /// G(x) = P(xi >= x).
  double reliability(double x) const;
  /// Inverse CDF on (0, 1); the sampler for this law.
  double quantile(double u) const;
  /// Local tail exponent of F at x, i.e. |F(x) - F(t)| ~ |x - t|^e for t near x.
  double local_exponent(double x) const;
  /// x - Q(F(x) (1 - s)) for s in (0, 1], computed without cancellation
  /// where the law allows it.
  double gap_below(double x, double s) const;

  /// D^alpha[G](x) including the 1 / Gamma(1 - alpha) factor. Closed form
  /// where one exists, otherwise tanh-sinh quadrature of the Stieltjes form.
  double reliability_frac_derivative(double x, const FractionalOrder& order) const;
  /// D^alpha of the function this object names: G for laws, the indicator
  /// itself for the two indicator kinds.
  double frac_derivative_of_function(double x, const FractionalOrder& order) const;
  /// Value of the function named by frac_derivative_of_function.
  double function_value(double x) const;

 private:
  ClosedForm(Kind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}
  double numeric_reliability_frac_derivative(double x, double alpha) const;
  double density_by_distance(double t, double dist_to_center) const;

  Kind kind_;
  double p1_;
  double p2_;
};

}  // namespace fracest
