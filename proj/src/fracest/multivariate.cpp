#include "fracest/multivariate.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "fracest/error.hpp"
#include "fracest/special.hpp"

namespace fracest {

namespace {

void require_positive_point(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    throw InvalidInput("mixed evaluation point must have x > 0 and y > 0");
  }
}

void require_regime(const MixedOrder& order) {
  if (!order.estimation_regime()) throw RegimeError("mixed estimator needs alpha, beta < 1/2");
}

// 1/(Gamma(1 - a) Gamma(1 - b)).
double gamma_scale(const MixedOrder& order) {
  return 1.0 / (gamma_fn(1.0 - order.alpha().alpha()) * gamma_fn(1.0 - order.beta().alpha()));
}

std::vector<double> axis_weights(const std::vector<double>& nodes) {
  const std::size_t k = nodes.size();
  std::vector<double> w(k, 0.0);
  w[0] = nodes[0];
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double half = 0.5 * (nodes[i + 1] - nodes[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

void check_axis(const std::vector<double>& nodes) {
  if (nodes.empty()) throw InvalidInput("field axis is empty");
  if (!(nodes[0] >= 0.0)) throw InvalidInput("field axis must be nonnegative");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw InvalidInput("field axis must be strictly increasing");
  }
  if (!(nodes.back() > 0.0)) throw InvalidInput("field axis must reach a positive point");
}

std::vector<double> inner_breakpoints(double b, double p) {
  const double tol = 1e-12 * b;
  if (p > tol && p < b - tol) return {p};
  return {};
}

}  // namespace

Sample2D::Sample2D(std::vector<std::pair<double, double>> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw InvalidInput("pair sample is empty");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto [a, b] = pairs_[i];
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
      throw InvalidInput("pair " + std::to_string(i + 1) + " has a negative or non-finite coordinate");
    }
  }
}

Sample2D Sample2D::swapped() const {
  std::vector<std::pair<double, double>> out;
  out.reserve(pairs_.size());
  for (const auto& [a, b] : pairs_) out.emplace_back(b, a);
  return Sample2D(std::move(out));
}

MixedOrder::Regime MixedOrder::regime() const {
  if (beta_.alpha() < alpha_.alpha()) return Regime::BetaLtAlpha;
  if (beta_.alpha() > alpha_.alpha()) return Regime::BetaGtAlpha;
  return Regime::BetaEqAlpha;
}

std::string regime_name(MixedOrder::Regime r) {
  switch (r) {
    case MixedOrder::Regime::BetaLtAlpha: return "beta_lt_alpha";
    case MixedOrder::Regime::BetaEqAlpha: return "beta_eq_alpha";
    case MixedOrder::Regime::BetaGtAlpha: return "beta_gt_alpha";
  }
  return "unknown";
}

double mixed_summand(double xi, double eta, double x, double y, const MixedOrder& order) {
  require_positive_point(x, y);
  return indicator_frac_derivative(x, xi, order.alpha()) * indicator_frac_derivative(y, eta, order.beta());
}

double estimate_mixed(const Sample2D& s, double x, double y, const MixedOrder& order) {
  require_positive_point(x, y);
  require_regime(order);
  if (order.regime() == MixedOrder::Regime::BetaGtAlpha) {
    return estimate_mixed(s.swapped(), y, x, order.swapped());
  }
  double acc = 0.0;
  for (const auto& [xi, eta] : s.pairs()) acc += mixed_summand(xi, eta, x, y, order);
  return acc / static_cast<double>(s.size()) * gamma_scale(order);
}

PairLaw parse_pair_law(const std::string& name) {
  if (name == "independent") return PairLaw::IndependentUniform;
  if (name == "comonotone") return PairLaw::Comonotone;
  throw InvalidInput("unknown pair law '" + name + "' (expected independent or comonotone)");
}

std::string pair_law_name(PairLaw law) {
  return law == PairLaw::IndependentUniform ? "independent" : "comonotone";
}

Sample2D draw_pairs(PairLaw law, std::size_t n, Philox& rng) {
  std::vector<std::pair<double, double>> pairs(n);
  for (auto& p : pairs) {
    const double u = rng.uniform();
    p = {u, law == PairLaw::Comonotone ? u : rng.uniform()};
  }
  return Sample2D(std::move(pairs));
}

double mixed_truth(PairLaw law, double x, double y, const MixedOrder& order) {
  require_positive_point(x, y);
  if (x > 1.0 || y > 1.0) return 0.0;
  if (law == PairLaw::IndependentUniform) {
    return uniform_reliability_frac_derivative(x, order.alpha()) * uniform_reliability_frac_derivative(y, order.beta());
  }
  const double a = order.alpha().alpha();
  const double b = order.beta().alpha();
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  // t in [0, lo): both kernels active, the one at lo singular at the right end.
  auto both = [&](double t, double tc) {
    const double gap_lo = tc > 0.0 ? tc : lo - t;
    const double gx = x == lo ? gap_lo : x - t;
    const double gy = y == lo ? gap_lo : y - t;
    return (std::pow(x, -a) - std::pow(gx, -a)) * (std::pow(y, -b) - std::pow(gy, -b));
  };
  double total = ts.integrate(both, 0.0, lo, 1e-12);
  if (hi > lo) {
    auto one = [&](double t, double tc) {
      const double gap = tc > 0.0 ? tc : hi - t;
      if (x == hi) return (std::pow(x, -a) - std::pow(gap, -a)) * std::pow(y, -b);
      return std::pow(x, -a) * (std::pow(y, -b) - std::pow(gap, -b));
    };
    total += ts.integrate(one, lo, hi, 1e-12);
  }
  total += (1.0 - hi) * std::pow(x, -a) * std::pow(y, -b);
  return total * gamma_scale(order);
}

double comonotone_nested_oracle(double x, double y, const MixedOrder& order, std::size_t points) {
  require_positive_point(x, y);
  if (x == y) throw InvalidInput("nested oracle needs x != y");
  if (x > 1.0 || y > 1.0) throw InvalidInput("nested oracle needs x, y <= 1");
  if (points < 16) throw InvalidInput("nested oracle needs at least 16 points per axis");
  const auto intervals = points - 1;
  const auto xs = composite_nodes(x, intervals, inner_breakpoints(x, y), default_grading(order.alpha()));
  std::vector<double> inner(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double xk = xs[k];
    const auto ys = composite_nodes(y, intervals, inner_breakpoints(y, xk), default_grading(order.beta()));
    const auto g = tabulate(ys, [xk](double v) { return 1.0 - std::max(xk, v); });
    inner[k] = frac_derivative(g, order.beta(), Monotonicity::Any).values().back();
  }
  const GridFunction h(xs, std::move(inner));
  return frac_derivative(h, order.alpha(), Monotonicity::Any).values().back();
}

Field2D mixed_loss_field(const Sample2D& s, const MixedOrder& order, PairLaw law, const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  require_regime(order);
  check_axis(xs);
  check_axis(ys);
  Field2D field{xs, ys, std::vector<double>(xs.size() * ys.size())};
  const double scale = 1.0 / gamma_scale(order);
  const double root_n = std::sqrt(static_cast<double>(s.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double truth = mixed_truth(law, xs[i], ys[j], order) * scale;
      double acc = 0.0;
      for (const auto& [xi, eta] : s.pairs()) acc += mixed_summand(xi, eta, xs[i], ys[j], order);
      field.values[i * ys.size() + j] = root_n * (acc / static_cast<double>(s.size()) - truth);
    }
  }
  return field;
}

double lq_norm_2d(const Field2D& field, double q) {
  if (!(q >= 1.0)) throw InvalidInput("q must be at least 1");
  check_axis(field.xs);
  check_axis(field.ys);
  if (field.values.size() != field.xs.size() * field.ys.size()) throw InvalidInput("field has the wrong size");
  const auto wx = axis_weights(field.xs);
  const auto wy = axis_weights(field.ys);
  double acc = 0.0;
  for (std::size_t i = 0; i < wx.size(); ++i) {
    for (std::size_t j = 0; j < wy.size(); ++j) acc += wx[i] * wy[j] * std::pow(std::abs(field.at(i, j)), q);
  }
  return std::pow(acc / (field.xs.back() * field.ys.back()), 1.0 / q);
}

double summand_power_integral(double xi, double alpha, double q) {
  const double eps = 1.0 - alpha * q;
  if (!(eps > 0.0)) throw RegimeError("summand is not in L_q for q >= 1/alpha");
  if (!(xi > 0.0)) return 0.0;
  if (xi >= 1.0) return 1.0 / eps;
  // [0, xi): x^-aq. [xi, 1]: t = x - xi = L e^-s, the 1/eps part taken exactly.
  const double head = std::pow(xi, eps) / eps;
  const double len = 1.0 - xi;
  auto g = [&](double s) {
    const double t = len * std::exp(-s);
    const double shrink = -std::expm1(-alpha * std::log1p(xi / t));
    return std::exp(-eps * s) * std::expm1(q * std::log(shrink));
  };
  const double split = std::max(0.0, std::log(len / xi));
  double rest = 0.0;
  if (split > 0.0) {
    rest += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, split, 10, 1e-10);
  }
  thread_local boost::math::quadrature::exp_sinh<double> es;
  rest += es.integrate(g, split, std::numeric_limits<double>::infinity(), 1e-10);
  return head + std::pow(len, eps) * (1.0 / eps + rest);
}

double uniform_summand_power_mean(double alpha, double q) {
  const double eps = 1.0 - alpha * q;
  if (!(eps > 0.0)) throw RegimeError("summand is not in L_q for q >= 1/alpha");
  // int_0^1 (u^-a - 1)^q du = B(1/a - q, q + 1) / a.
  return 1.0 / eps - 1.0 / (1.0 + eps) + beta_fn(1.0 / alpha - q, q + 1.0) / (alpha * (1.0 + eps));
}

PoleLadder pole_order_ladder(const MixedOrder& order, PairLaw law, const std::vector<double>& eps,
                             const McConfig& cfg) {
  if (eps.size() < 2) throw InvalidInput("pole ladder needs at least two points");
  const double a = order.alpha().alpha();
  const double b = order.beta().alpha();
  const double top = std::max(a, b);
  PoleLadder out;
  out.eps = eps;
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw InvalidInput("pole ladder distances must lie in (0, 1)");
    out.qs.push_back((1.0 - e) / top);
  }
  const auto table = run_replications(cfg, [&](Philox& rng, std::size_t) {
    const double xi = rng.uniform();
    const double eta = law == PairLaw::Comonotone ? xi : rng.uniform();
    std::vector<double> row;
    row.reserve(out.qs.size());
    for (double q : out.qs) row.push_back(summand_power_integral(xi, a, q) * summand_power_integral(eta, b, q));
    return row;
  });
  std::vector<double> log_eps, log_m;
  for (std::size_t k = 0; k < out.qs.size(); ++k) {
    const Moments m = batch_moments(column(table, k));
    out.moments.push_back(m.mean());
    out.stderrs.push_back(m.stderr_of_mean());
    log_eps.push_back(std::log(eps[k]));
    log_m.push_back(std::log(m.mean()));
  }
  out.slope = slope_fit(log_eps, log_m).slope;
  return out;
}

}  // namespace fracest
