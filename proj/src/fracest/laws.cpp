#include "fracest/laws.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <sstream>
#include <vector>

#include "fracest/error.hpp"
#include "fracest/special.hpp"

namespace fracest {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double to_number(const std::string& s, const std::string& ctx) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("law '" + ctx + "': bad number '" + s + "'");
  }
}

}  // namespace

ClosedForm ClosedForm::indicator_survival(double h) {
  if (!(h > 0.0)) throw InvalidInput("indicator law: h must be positive");
  return {Kind::IndicatorSurvival, h, 0.0};
}

ClosedForm ClosedForm::indicator_cdf(double h) {
  if (!(h > 0.0)) throw InvalidInput("indicator law: h must be positive");
  return {Kind::IndicatorCdf, h, 0.0};
}

ClosedForm ClosedForm::uniform_reliability() { return {Kind::UniformReliability, 1.0, 1.0}; }

ClosedForm ClosedForm::power_cdf(double delta, double c1) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidInput("power law: delta must lie in (0, 1]");
  if (!(c1 > 0.0)) throw InvalidInput("power law: c1 must be positive");
  return {Kind::PowerCdf, delta, c1};
}

ClosedForm ClosedForm::power_cusp(double delta, double m) {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidInput("cusp law: delta must lie in (0, 1]");
  if (!(m > 0.0)) throw InvalidInput("cusp law: center must be positive");
  return {Kind::PowerCusp, delta, m};
}

ClosedForm ClosedForm::parse(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw InvalidInput("empty law specification");
  const std::string& head = parts[0];
  if (head == "uniform" && parts.size() == 1) return uniform_reliability();
  if (head == "power" && parts.size() == 3) {
    return power_cdf(to_number(parts[1], spec), to_number(parts[2], spec));
  }
  if (head == "cusp" && parts.size() == 3) {
    return power_cusp(to_number(parts[1], spec), to_number(parts[2], spec));
  }
  if (head == "indicator" && parts.size() == 2) return indicator_survival(to_number(parts[1], spec));
  throw InvalidInput("unknown law '" + spec + "' (expected uniform, power:D:C, cusp:D:M, indicator:H)");
}

std::string ClosedForm::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::IndicatorSurvival:
      os << "indicator_survival:" << p1_;
      break;
    case Kind::IndicatorCdf:
      os << "indicator_cdf:" << p1_;
      break;
    case Kind::UniformReliability:
      os << "uniform";
      break;
    case Kind::PowerCdf:
      os << "power:" << p1_ << ':' << p2_;
      break;
    case Kind::PowerCusp:
      os << "cusp:" << p1_ << ':' << p2_;
      break;
  }
  return os.str();
}

bool ClosedForm::absolutely_continuous() const {
  return kind_ != Kind::IndicatorSurvival && kind_ != Kind::IndicatorCdf;
}

double ClosedForm::support_end() const {
  switch (kind_) {
    case Kind::IndicatorSurvival:
    case Kind::IndicatorCdf:
      return p1_;
    case Kind::UniformReliability:
      return 1.0;
    case Kind::PowerCdf:
      return std::pow(p2_, -1.0 / p1_);
    case Kind::PowerCusp:
      return 2.0 * p2_;
  }
  return 1.0;
}

double ClosedForm::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::IndicatorSurvival:
    case Kind::IndicatorCdf:
      return x > p1_ ? 1.0 : 0.0;
    case Kind::UniformReliability:
      return std::min(x, 1.0);
    case Kind::PowerCdf:
      return std::min(1.0, p2_ * std::pow(x, p1_));
    case Kind::PowerCusp: {
      const double m = p2_;
      if (x >= 2.0 * m) return 1.0;
      if (x < m) return 0.5 - 0.5 * std::pow(1.0 - x / m, p1_);
      return 0.5 + 0.5 * std::pow(x / m - 1.0, p1_);
    }
  }
  return 0.0;
}

double ClosedForm::reliability(double x) const {
  if (!absolutely_continuous()) return x <= p1_ ? 1.0 : 0.0;
  return 1.0 - cdf(x);
}

double ClosedForm::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw InvalidInput("quantile: u must lie in (0, 1)");
  switch (kind_) {
    case Kind::IndicatorSurvival:
    case Kind::IndicatorCdf:
      return p1_;
    case Kind::UniformReliability:
      return u;
    case Kind::PowerCdf:
      return std::pow(u / p2_, 1.0 / p1_);
    case Kind::PowerCusp: {
      const double m = p2_;
      if (u < 0.5) return m * (1.0 - std::pow(1.0 - 2.0 * u, 1.0 / p1_));
      return m * (1.0 + std::pow(2.0 * u - 1.0, 1.0 / p1_));
    }
  }
  return 0.0;
}

double ClosedForm::local_exponent(double x) const {
  switch (kind_) {
    case Kind::IndicatorSurvival:
    case Kind::IndicatorCdf:
      return 0.0;
    case Kind::UniformReliability:
      return 1.0;
    case Kind::PowerCdf:
      return x == 0.0 ? p1_ : 1.0;
    case Kind::PowerCusp:
      return x == p2_ ? p1_ : 1.0;
  }
  return 1.0;
}

double ClosedForm::gap_below(double x, double s) const {
  switch (kind_) {
    case Kind::IndicatorSurvival:
    case Kind::IndicatorCdf:
      return x - p1_;
    case Kind::UniformReliability:
      if (x <= 1.0) return x * s;
      break;
    case Kind::PowerCdf:
      if (x <= support_end()) return x * one_minus_pow_complement(s, 1.0 / p1_);
      break;
    case Kind::PowerCusp:
      if (x == p2_) return p2_ * std::pow(s, 1.0 / p1_);
      break;
  }
  return x - quantile(cdf(x) * (1.0 - s));
}

double ClosedForm::density_by_distance(double t, double dist_to_center) const {
  switch (kind_) {
    case Kind::UniformReliability:
      return 1.0;
    case Kind::PowerCdf:
      return p2_ * p1_ * std::pow(t, p1_ - 1.0);
    case Kind::PowerCusp:
      return 0.5 * p1_ / p2_ * std::pow(dist_to_center / p2_, p1_ - 1.0);
    default:
      return 0.0;
  }
}

double ClosedForm::numeric_reliability_frac_derivative(double x, double alpha) const {
  // Gamma(1 - a) D^a G(x) = x^-a - int_0^x (x - t)^-a p(t) dt
  struct Piece {
    double lo, hi;
    bool center_at_lo;
  };
  std::vector<Piece> pieces;
  const double b = std::min(x, support_end());
  if (kind_ == Kind::PowerCusp) {
    const double m = p2_;
    pieces.push_back({0.0, std::min(b, m), false});
    if (b > m) pieces.push_back({m, b, true});
  } else {
    pieces.push_back({0.0, b, true});
  }
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double integral = 0.0;
  for (const Piece& pc : pieces) {
    if (!(pc.hi > pc.lo)) continue;
    auto f = [&](double t, double tc) {
      double d_lo = t - pc.lo;
      double d_hi = pc.hi - t;
      if (tc < 0.0) d_lo = -tc;
      if (tc > 0.0) d_hi = tc;
      const double gap = (pc.hi == x) ? d_hi : x - t;
      double dc;
      if (kind_ == Kind::PowerCusp) {
        dc = pc.center_at_lo ? d_lo : d_hi;
      } else {
        dc = d_lo;
      }
      const double tt = (kind_ == Kind::PowerCdf) ? d_lo : t;
      return std::pow(gap, -alpha) * density_by_distance(tt, dc);
    };
    integral += integrator.integrate(f, pc.lo, pc.hi, 1e-12);
  }
  return (std::pow(x, -alpha) - integral) / gamma_fn(1.0 - alpha);
}

double ClosedForm::reliability_frac_derivative(double x, const FractionalOrder& order) const {
  if (!(x > 0.0)) throw InvalidInput("fractional derivative: x must be positive");
  const double a = order.alpha();
  const double g = gamma_fn(1.0 - a);
  switch (kind_) {
    case Kind::IndicatorSurvival:
    case Kind::IndicatorCdf:
      return indicator_frac_derivative(x, p1_, order) / g;
    case Kind::UniformReliability: {
      const double tail = x > 1.0 ? std::pow(x - 1.0, 1.0 - a) : 0.0;
      return (std::pow(x, -a) - (std::pow(x, 1.0 - a) - tail) / (1.0 - a)) / g;
    }
    case Kind::PowerCdf:
      if (x <= support_end()) {
        const double d = p1_;
        return std::pow(x, -a) / g - p2_ * gamma_fn(1.0 + d) / gamma_fn(1.0 + d - a) * std::pow(x, d - a);
      }
      return numeric_reliability_frac_derivative(x, a);
    case Kind::PowerCusp:
      if (x == p2_) {
        const double d = p1_;
        if (!(d > a)) {
          throw RegimeError("cusp law: D^alpha G diverges at the center unless delta > alpha");
        }
        return std::pow(x, -a) * (1.0 - d / (2.0 * (d - a))) / g;
      }
      return numeric_reliability_frac_derivative(x, a);
  }
  return 0.0;
}

double ClosedForm::frac_derivative_of_function(double x, const FractionalOrder& order) const {
  if (kind_ == Kind::IndicatorCdf) {
    if (!(x > 0.0)) throw InvalidInput("fractional derivative: x must be positive");
    const double a = order.alpha();
    return x > p1_ ? std::pow(x - p1_, -a) / gamma_fn(1.0 - a) : 0.0;
  }
  return reliability_frac_derivative(x, order);
}

double ClosedForm::function_value(double x) const {
  switch (kind_) {
    case Kind::IndicatorSurvival:
      return x < p1_ ? 1.0 : 0.0;
    case Kind::IndicatorCdf:
      return p1_ < x ? 1.0 : 0.0;
    default:
      return reliability(x);
  }
}

}  // namespace fracest
