#pragma once

#include <functional>
#include <string>
#include <vector>

namespace fracest {

/// Derivative order alpha in (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);

  double alpha() const { return alpha_; }
  /// True iff alpha < 1/2, where the estimator's variance theory holds.
  bool estimation_regime() const { return alpha_ < 0.5; }

 private:
  double alpha_;
};

struct Grading {
  enum class Kind { Uniform, Graded, Composite };
  Kind kind = Kind::Uniform;
  double exponent = 1.0;

  std::string label() const;
  static Grading parse(const std::string& label);
};

/// A function tabulated on strictly increasing nodes in [0, b].
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<double> nodes, std::vector<double> values, Grading grading = {});

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  const Grading& grading() const { return grading_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// Piecewise-linear interpolation; constant extension outside the nodes.
  double operator()(double x) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  Grading grading_;
};

/// N + 1 equispaced nodes on [0, b].
std::vector<double> uniform_nodes(double b, std::size_t intervals);
/// N + 1 nodes b (k/N)^r.
std::vector<double> graded_nodes(double b, std::size_t intervals, double r);
/// Nodes on [0, b] graded with exponent r toward 0 and toward each
/// breakpoint, from both sides. Intervals are shared in proportion to length.
std::vector<double> composite_nodes(double b, std::size_t intervals, std::vector<double> breakpoints,
                                    double r);
/// Default grading exponent 2 / (1 - alpha).
double default_grading(const FractionalOrder& order);

GridFunction tabulate(const std::vector<double>& nodes, const std::function<double(double)>& f,
                      Grading grading = {});

/// Riemann-Liouville integral I^alpha by product integration: f linear
/// between nodes, kernel (x - t)^(alpha - 1) integrated exactly per cell.
GridFunction frac_integral(const GridFunction& f, const FractionalOrder& order);

/// I^alpha of the step function equal to levels[j] on [edges[j], edges[j+1]),
/// evaluated at each point of `at`. Exact for step data.
std::vector<double> frac_integral_step(const std::vector<double>& edges, const std::vector<double>& levels,
                                       const FractionalOrder& order, const std::vector<double>& at);

enum class Monotonicity { Require, Any };

/// Riemann-Liouville derivative in the Stieltjes form
///   Gamma(1 - alpha) D^alpha F(x) = F(0) x^-alpha + int_0^x dF(t) (x - t)^-alpha
/// with F linear between nodes. Returns 0 at x = 0. When the first node is
/// positive, F is taken constant on [0, x_0].
GridFunction frac_derivative(const GridFunction& F, const FractionalOrder& order,
                             Monotonicity check = Monotonicity::Require);

/// f_{alpha,h}(x) = x^-alpha - (x - h)^-alpha I(x > h). Not divided by Gamma(1 - alpha).
double indicator_frac_derivative(double x, double h, const FractionalOrder& order);

/// D^alpha of G(x) = 1 - x on (0, 1].
double uniform_reliability_frac_derivative(double x, const FractionalOrder& order);

/// Two-column CSV with the `# grid=... alpha=...` header; %.17g floats.
std::string to_csv(const GridFunction& f, double alpha);
/// Parses to_csv output. `alpha`, when non-null, receives the header value.
GridFunction grid_from_csv(const std::string& text, double* alpha = nullptr);

}  // namespace fracest
