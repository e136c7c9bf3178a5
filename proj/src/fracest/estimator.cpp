#include "fracest/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracest/error.hpp"
#include "fracest/mc.hpp"
#include "fracest/rng.hpp"
#include "fracest/special.hpp"

namespace fracest {

namespace {

void require_regime(const FractionalOrder& order) {
  if (!order.estimation_regime()) {
    throw RegimeError("alpha must be < 1/2 for the estimator (got " + std::to_string(order.alpha()) +
                      "); the variance theory needs the 2 alpha order below 1");
  }
}

void require_positive_x(double x) {
  if (!(x > 0.0)) throw InvalidInput("evaluation point x must be positive");
}

}  // namespace

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("sample is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw InvalidInput("sample value " + std::to_string(i + 1) + " is negative or not finite");
    }
  }
  sorted_ = std::is_sorted(values_.begin(), values_.end());
}

double summand_mean(const std::vector<double>& xs, double x, double alpha) {
  require_positive_x(x);
  const double base = std::pow(x, -alpha);
  double acc = 0.0;
  for (double xi : xs) {
    if (xi < x) acc += std::pow(x - xi, -alpha);
  }
  return base - acc / static_cast<double>(xs.size());
}

double estimate_point(const Sample& s, double x, const FractionalOrder& order) {
  require_positive_x(x);
  require_regime(order);
  return summand_mean(s.values(), x, order.alpha()) / gamma_fn(1.0 - order.alpha());
}

Sigma2 sigma2_alpha(const Sample& s, double x, const FractionalOrder& order) {
  require_positive_x(x);
  require_regime(order);
  const double a = order.alpha();
  const double A = summand_mean(s.values(), x, a);
  const double B = summand_mean(s.values(), x, 2.0 * a);
  Sigma2 out;
  out.value = 2.0 * std::pow(x, -a) * A - B - A * A;
  if (out.value < 0.0) {
    out.value = 0.0;
    out.clamped = true;
  }
  return out;
}

double sigma2_alpha_exact(const ClosedForm& law, double x, const FractionalOrder& order) {
  require_positive_x(x);
  require_regime(order);
  const double a = order.alpha();
  const double A = gamma_fn(1.0 - a) * law.reliability_frac_derivative(x, order);
  const double B = gamma_fn(1.0 - 2.0 * a) * law.reliability_frac_derivative(x, FractionalOrder(2.0 * a));
  return 2.0 * std::pow(x, -a) * A - B - A * A;
}

PointEstimate confidence_interval(const Sample& s, double x, const FractionalOrder& order, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("confidence level must lie in (0, 1)");
  const double g = gamma_fn(1.0 - order.alpha());
  PointEstimate pe;
  pe.level = level;
  pe.value = estimate_point(s, x, order);
  const Sigma2 s2 = sigma2_alpha(s, x, order);
  pe.variance_clamped = s2.clamped;
  pe.variance = s2.value / (static_cast<double>(s.size()) * g * g);
  pe.stderr = std::sqrt(pe.variance);
  const double z = normal_quantile(0.5 * (1.0 + level));
  pe.ci_low = pe.value - z * pe.stderr;
  pe.ci_high = pe.value + z * pe.stderr;
  return pe;
}

TailDiagnostic tail_diagnostic(const ClosedForm& law, double x, const FractionalOrder& order,
                               const TailConfig& cfg) {
  require_positive_x(x);
  if (cfg.draws < 100) throw InvalidInput("tail diagnostic needs at least 100 draws");
  const double a = order.alpha();
  const double g = gamma_fn(1.0 - a);
  const double truth = law.reliability_frac_derivative(x, order);
  const double Fx = law.cdf(x);

  TailDiagnostic out;
  out.delta = law.local_exponent(x);
  out.expected_slope = -out.delta / a;

  // Proposal in u: with prob 1/2 uniform, else u = F(x)(1 - V^8).
  constexpr double kPower = 8.0;
  std::vector<double> dev(cfg.draws);
  std::vector<double> weight(cfg.draws);
  Philox rng(cfg.seed, 0);
  const double base = std::pow(x, -a);
  for (std::size_t i = 0; i < cfg.draws; ++i) {
    // s = 1 - u / F(x) measures how far below x the draw lands.
    double s = 2.0;
    if (Fx > 0.0 && rng.uniform() < 0.5) {
      s = std::pow(rng.uniform(), kPower);
    } else {
      const double u = rng.uniform();
      if (u < Fx) s = 1.0 - u / Fx;
    }
    double q = 1.0;
    double summand = base;
    if (s <= 1.0) {
      q += std::pow(s, 1.0 / kPower - 1.0) / (kPower * Fx);
      const double gap = law.gap_below(x, s);
      if (gap > 0.0) summand -= std::pow(gap, -a);
    }
    weight[i] = 2.0 / q;
    dev[i] = std::abs(summand / g - truth);
  }

  std::vector<double> levels = cfg.levels;
  if (levels.empty()) levels = geometric_levels(3.0);
  TailDiagnostic curve = weighted_exceedance(dev, weight, levels, cfg.fit_from);
  curve.delta = out.delta;
  curve.expected_slope = out.expected_slope;
  return curve;
}

std::vector<double> geometric_levels(double from) {
  std::vector<double> levels;
  for (double y = from; y < 1e12; y *= std::sqrt(2.0)) levels.push_back(y);
  return levels;
}

TailDiagnostic weighted_exceedance(const std::vector<double>& dev, const std::vector<double>& weight,
                                   const std::vector<double>& levels, double fit_from) {
  if (dev.size() != weight.size() || dev.empty()) throw InvalidInput("exceedance: bad draw arrays");
  if (!std::is_sorted(levels.begin(), levels.end())) throw InvalidInput("tail levels must be increasing");
  TailDiagnostic out;
  std::vector<std::size_t> idx(dev.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return dev[l] > dev[r]; });
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

  // Walk levels from the top, accumulating the weight of draws above y.
  std::vector<double> exceed(levels.size());
  std::vector<std::size_t> count(levels.size());
  std::size_t k = 0;
  double w = 0.0;
  for (std::size_t j = levels.size(); j-- > 0;) {
    while (k < idx.size() && dev[idx[k]] > levels[j]) {
      w += weight[idx[k]];
      ++k;
    }
    exceed[j] = std::min(1.0, w / total);
    count[j] = k;
  }
  // Stop at the first level with too few exceedances to estimate.
  constexpr std::size_t kMinCount = 50;
  std::vector<double> lx, ly;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (count[j] < kMinCount) break;
    out.levels.push_back(levels[j]);
    out.exceedance.push_back(exceed[j]);
    if (levels[j] >= fit_from && exceed[j] > 0.0) {
      lx.push_back(std::log(levels[j]));
      ly.push_back(std::log(exceed[j]));
    }
  }
  out.fit_points = lx.size();
  if (lx.size() >= 3) {
    const SlopeFit fit = slope_fit(lx, ly);
    out.fitted_slope = fit.slope;
    out.slope_ci_low = fit.ci_low;
    out.slope_ci_high = fit.ci_high;
    out.estimable = true;
  }
  return out;
}

}  // namespace fracest
