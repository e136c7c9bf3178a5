#pragma once

#include <functional>
#include <vector>

#include "fracest/estimator.hpp"
#include "fracest/fraccalc.hpp"
#include "fracest/gaussian.hpp"
#include "fracest/laws.hpp"
#include "fracest/mc.hpp"

namespace fracest {

/// Rosenthal constant for symmetric sums.
inline constexpr double kRosenthal = 0.6535;

/// g_alpha(x) = x^-a - x^(1-a) / (1 - a), the mean summand for the uniform law.
double g_alpha(double x, double alpha);

/// zeta_n(x) = n^-1/2 sum (f_{a,xi_i}(x) - g_a(x)) / Gamma(1 - a) on the given
/// positive nodes.
GridFunction centered_process_path(const Sample& s, const FractionalOrder& order,
                                   const std::vector<double>& nodes);

/// (int |f|^q dx / b)^(1/q) over [0, b], b the last node: trapezoid between
/// nodes, f constant on [0, x_0].
double lq_norm(const GridFunction& f, double q);

struct Refinement {
  std::vector<std::size_t> intervals;
  std::vector<double> norms;
  /// Increments of int |f|^q stop shrinking: the norm grows without bound.
  bool diverging = false;
};

/// lq_norm of f tabulated on nodes that double `levels` - 1 times (levels >= 4) starting from
/// `n0` intervals. `make_nodes(N)` returns positive nodes for N intervals.
Refinement lq_norm_refinement(const std::function<double(double)>& f, double q,
                              const std::function<std::vector<double>(std::size_t)>& make_nodes,
                              std::size_t n0, std::size_t levels);

/// K(a, q) = 2^(1 - 1/q) / Gamma(1 - a) [(1 - a)^-q + (1 - a q)^-1]^(1/q).
double deterministic_bound_K(const FractionalOrder& order, double q);

/// K_R max(2 / ln 2, (1/a) / |ln a|).
double rosenthal_constant(const FractionalOrder& order);

/// ||zeta_1||_q over [0, 1] for a single observation xi, by tanh-sinh
/// after removing the (x - xi)^-a q endpoint singularity.
double single_path_norm(double xi, const FractionalOrder& order, double q);

/// W_{q,1} = (E ||zeta_1||_q^q)^(1/q) under the uniform law, by quadrature.
double w_q1_exact(const FractionalOrder& order, double q);

class CovKernel {
 public:
  enum class Variant { ClosedR, ExactC };

  CovKernel(const FractionalOrder& order, Variant variant) : order_(order), variant_(variant) {}

  /// Covariance of the Gamma-scaled summands Gamma(1 - a) zeta. The
  /// diagonal is sigma^2_a(x) = x^(1-2a)/(1-2a) - x^(2-2a)/(1-a)^2.
  double raw(double x, double y) const;
  /// Covariance of zeta itself: raw / Gamma^2(1 - a).
  double operator()(double x, double y) const;
  /// Row-major matrix of operator() on the nodes.
  std::vector<double> matrix(const std::vector<double>& nodes) const;
  /// ExactC computed through frac_integral (product integration); used to
  /// cross-check the fast quadrature behind raw().
  double exact_raw_product_integration(double x, double y, std::size_t intervals = 2048) const;

  Variant variant() const { return variant_; }
  const FractionalOrder& order() const { return order_; }

 private:
  FractionalOrder order_;
  Variant variant_;
};

/// int_0^x s^-a (s + d)^-a w(s) ds; w defaults to 1.
double cross_moment(double x, double d, double alpha, const std::function<double(double)>& weight = {});

struct LossSpec {
  double q = 2.0;
  FractionalOrder order{0.25};
  std::size_t n = 100;
  std::size_t reps = 200;

  bool valid() const { return q >= 1.0 && q * order.alpha() < 1.0; }
  bool rosenthal_branch() const { return valid() && q >= 2.0; }
};

/// Monte-Carlo W_{q,n} for every q in `qs` on shared samples. Per
/// replication int |zeta_n|^q dF is taken on the midpoint probability grid
/// x_j = F^-1((j + 1/2) / M). Reports series w_qn, w_qn_stderr, bound.
McReport empirical_loss_ladder(const FractionalOrder& order, const std::vector<double>& qs, std::size_t n,
                               const ClosedForm& law, const McConfig& cfg, std::size_t grid_points = 256);

/// Single-q form. Reports w_qn, w_qn_stderr, k_alpha_q, k_rosenthal, bound, pass.
McReport empirical_loss(const LossSpec& spec, const ClosedForm& law, const McConfig& cfg,
                        std::size_t grid_points = 256);

/// Centered Gaussian process with a CovKernel covariance on a fixed grid.
class LimitProcess {
 public:
  LimitProcess(const CovKernel& kernel, std::vector<double> nodes);

  const std::vector<double>& nodes() const { return nodes_; }
  double jitter() const { return sampler_.jitter(); }
  /// L_q norms of cfg.reps simulated paths.
  std::vector<double> sample_norms(double q, const McConfig& cfg) const;
  /// Q(u) = P(||zeta||_q > u).
  double tail_probability(double q, double u, const McConfig& cfg) const;

 private:
  std::vector<double> nodes_;
  GaussianSampler sampler_;
};

/// Default nodes for Gaussian sampling: (k/N)^r, k = 1..N.
std::vector<double> limit_grid(const FractionalOrder& order, std::size_t points = 512);

/// Exact P(D_n < d) for the two-sided KS statistic of n uniforms (Marsaglia, Tsang and Wang).
double ks_exact_cdf(std::size_t n, double d);

/// Reports, per u, the MC exceedance of sqrt(n) sup |G_n - G| and the bound 2 e^(-2u^2).
McReport kiefer_bound_check(std::size_t n, const std::vector<double>& us, const McConfig& cfg);

struct GlsNorm {
  std::vector<double> qs;
  std::vector<double> ratios;
  double value = 0.0;
  double argmax_q = 0.0;
  double support = 0.0;
};

/// psi_a(q) = (1 - a q)^(-1/q).
double psi_alpha(double q, double alpha);
/// 32 geometric points on [1.01, 0.99 / a].
std::vector<double> gls_q_grid(double alpha);
GlsNorm gls_norm(const GridFunction& f, const FractionalOrder& order);

/// Exceedance of |zeta_1(x)| on the product of the sample space and dx,
/// at geometric levels, with its fitted log-log slope.
TailDiagnostic joint_tail(const FractionalOrder& order, std::size_t draws, std::uint64_t seed,
                          double fit_from = 10.0);

}  // namespace fracest
