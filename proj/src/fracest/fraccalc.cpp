#include "fracest/fraccalc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fracest/error.hpp"
#include "fracest/special.hpp"

namespace fracest {

namespace {

// J1(rho) = int_0^rho w (1 - w)^(alpha - 1) dw.
double first_moment(double rho, double alpha) {
  if (rho < 0.5) {
    double c = 1.0;
    double p = rho * rho;
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double term = c * p / (k + 2.0);
      sum += term;
      if (std::abs(term) < 1e-17 * sum) break;
      c *= (k + 1.0 - alpha) / (k + 1.0);
      p *= rho;
    }
    return sum;
  }
  return one_minus_pow_complement(rho, alpha) / alpha -
         one_minus_pow_complement(rho, alpha + 1.0) / (alpha + 1.0);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("fractional order must lie in (0, 1), got " + format_double(alpha));
  }
}

std::string Grading::label() const {
  switch (kind) {
    case Kind::Uniform:
      return "uniform";
    case Kind::Graded:
      return "graded:" + format_double(exponent);
    case Kind::Composite:
      return "composite:" + format_double(exponent);
  }
  return "uniform";
}

Grading Grading::parse(const std::string& label) {
  if (label == "uniform") return {};
  const auto colon = label.find(':');
  if (colon == std::string::npos) throw InvalidInput("unknown grid label '" + label + "'");
  const std::string head = label.substr(0, colon);
  Grading g;
  try {
    g.exponent = std::stod(label.substr(colon + 1));
  } catch (const std::exception&) {
    throw InvalidInput("bad grading exponent in '" + label + "'");
  }
  if (head == "graded") {
    g.kind = Kind::Graded;
  } else if (head == "composite") {
    g.kind = Kind::Composite;
  } else {
    throw InvalidInput("unknown grid label '" + label + "'");
  }
  return g;
}

GridFunction::GridFunction(std::vector<double> nodes, std::vector<double> values, Grading grading)
    : nodes_(std::move(nodes)), values_(std::move(values)), grading_(grading) {
  if (nodes_.size() != values_.size()) throw InvalidInput("grid: nodes and values differ in length");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i]) || !std::isfinite(values_[i])) {
      throw InvalidInput("grid: non-finite entry at index " + std::to_string(i));
    }
    if (i == 0 && nodes_[0] < 0.0) throw InvalidInput("grid: first node is negative");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw InvalidInput("grid: nodes not strictly increasing at index " + std::to_string(i));
    }
  }
}

double GridFunction::operator()(double x) const {
  if (nodes_.empty()) throw InvalidInput("grid: empty");
  if (x <= nodes_.front()) return values_.front();
  if (x >= nodes_.back()) return values_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double w = (x - nodes_[j]) / (nodes_[j + 1] - nodes_[j]);
  return values_[j] + w * (values_[j + 1] - values_[j]);
}

std::vector<double> uniform_nodes(double b, std::size_t intervals) {
  if (!(b > 0.0) || intervals == 0) throw InvalidInput("uniform_nodes: need b > 0 and N >= 1");
  std::vector<double> x(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) x[k] = b * static_cast<double>(k) / static_cast<double>(intervals);
  x.back() = b;
  return x;
}

std::vector<double> graded_nodes(double b, std::size_t intervals, double r) {
  if (!(b > 0.0) || intervals == 0 || !(r >= 1.0)) {
    throw InvalidInput("graded_nodes: need b > 0, N >= 1, r >= 1");
  }
  std::vector<double> x(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    x[k] = b * std::pow(static_cast<double>(k) / static_cast<double>(intervals), r);
  }
  x.back() = b;
  return x;
}

std::vector<double> composite_nodes(double b, std::size_t intervals, std::vector<double> breakpoints,
                                    double r) {
  if (!(b > 0.0) || !(r >= 1.0)) throw InvalidInput("composite_nodes: need b > 0 and r >= 1");
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> ends{0.0};
  for (double p : breakpoints) {
    if (p > 0.0 && p < b && p > ends.back()) ends.push_back(p);
  }
  ends.push_back(b);

  // Pieces: (start, end, graded toward start?). Each segment grades toward
  // its left end; interior segments are split so both ends are refined.
  struct Piece {
    double lo, hi;
    bool toward_lo;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
    const double lo = ends[i];
    const double hi = ends[i + 1];
    if (i + 2 < ends.size()) {
      const double mid = 0.5 * (lo + hi);
      pieces.push_back({lo, mid, true});
      pieces.push_back({mid, hi, false});
    } else {
      pieces.push_back({lo, hi, true});
    }
  }
  if (intervals < 4 * pieces.size()) throw InvalidInput("composite_nodes: too few intervals");

  std::vector<double> x{0.0};
  std::size_t remaining = intervals;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const Piece& pc = pieces[p];
    std::size_t m;
    if (p + 1 == pieces.size()) {
      m = remaining;
    } else {
      m = std::max<std::size_t>(
          4, static_cast<std::size_t>(std::llround(static_cast<double>(intervals) * (pc.hi - pc.lo) / b)));
      m = std::min(m, remaining - 4 * (pieces.size() - p - 1));
    }
    remaining -= m;
    const double len = pc.hi - pc.lo;
    for (std::size_t k = 1; k <= m; ++k) {
      const double s = std::pow(static_cast<double>(k) / static_cast<double>(m), r);
      double v;
      if (pc.toward_lo) {
        v = pc.lo + len * s;
      } else {
        const double t = std::pow(static_cast<double>(m - k) / static_cast<double>(m), r);
        v = pc.hi - len * t;
      }
      if (k == m) v = pc.hi;
      // Fine grading can collapse nodes below double resolution.
      if (v <= x.back()) continue;
      x.push_back(v);
    }
  }
  return x;
}

double default_grading(const FractionalOrder& order) { return 2.0 / (1.0 - order.alpha()); }

GridFunction tabulate(const std::vector<double>& nodes, const std::function<double(double)>& f,
                      Grading grading) {
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i]);
  return GridFunction(nodes, std::move(v), grading);
}

GridFunction frac_integral(const GridFunction& f, const FractionalOrder& order) {
  if (f.empty()) throw InvalidInput("frac_integral: empty grid");
  const double a = order.alpha();
  const auto& t = f.nodes();
  const auto& v = f.values();
  const std::size_t n = t.size();
  const double inv_gamma = 1.0 / gamma_fn(a);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = t[i];
    if (x == 0.0) continue;
    double acc = 0.0;
    if (t[0] > 0.0) acc += v[0] * std::pow(x, a) * one_minus_pow_complement(t[0] / x, a) / a;
    for (std::size_t j = 0; j < i; ++j) {
      const double b = x - t[j];
      const double h = t[j + 1] - t[j];
      const double rho = h / b;
      const double ba = std::exp(a * std::log(b));
      const double m0 = ba * one_minus_pow_complement(rho, a) / a;
      const double w_right = ba * first_moment(rho, a) / rho;
      acc += (m0 - w_right) * v[j] + w_right * v[j + 1];
    }
    out[i] = acc * inv_gamma;
  }
  return GridFunction(t, std::move(out), f.grading());
}

std::vector<double> frac_integral_step(const std::vector<double>& edges, const std::vector<double>& levels,
                                       const FractionalOrder& order, const std::vector<double>& at) {
  if (edges.size() != levels.size() + 1 || levels.empty()) {
    throw InvalidInput("frac_integral_step: need one more edge than levels");
  }
  for (std::size_t j = 1; j < edges.size(); ++j) {
    if (!(edges[j] > edges[j - 1])) throw InvalidInput("frac_integral_step: edges not increasing");
  }
  const double a = order.alpha();
  const double scale = 1.0 / (a * gamma_fn(a));
  std::vector<double> out(at.size(), 0.0);
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double x = at[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < levels.size() && edges[j] < x; ++j) {
      const double b = x - edges[j];
      const double h = std::min(edges[j + 1], x) - edges[j];
      // (x - lo)^a - (x - hi)^a without cancellation
      acc += levels[j] * std::exp(a * std::log(b)) * one_minus_pow_complement(h / b, a);
    }
    out[i] = acc * scale;
  }
  return out;
}

GridFunction frac_derivative(const GridFunction& F, const FractionalOrder& order, Monotonicity check) {
  if (F.empty()) throw InvalidInput("frac_derivative: empty grid");
  const double a = order.alpha();
  const double g = 1.0 - a;
  const auto& t = F.nodes();
  const auto& v = F.values();
  const std::size_t n = t.size();
  if (check == Monotonicity::Require) {
    for (std::size_t j = 1; j < n; ++j) {
      if (v[j] < v[j - 1]) {
        throw InvalidInput("frac_derivative: F decreases at node " + std::to_string(j));
      }
    }
  }
  const double inv_gamma = 1.0 / gamma_fn(g);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = t[i];
    if (x == 0.0) continue;
    double acc = v[0] * std::pow(x, -a);
    for (std::size_t j = 0; j < i; ++j) {
      const double dF = v[j + 1] - v[j];
      if (dF == 0.0) continue;
      const double b = x - t[j];
      const double rho = (t[j + 1] - t[j]) / b;
      acc += dF * std::exp(-a * std::log(b)) * one_minus_pow_complement(rho, g) / (g * rho);
    }
    out[i] = acc * inv_gamma;
  }
  return GridFunction(t, std::move(out), F.grading());
}

double indicator_frac_derivative(double x, double h, const FractionalOrder& order) {
  if (!(x > 0.0)) throw InvalidInput("indicator_frac_derivative: x must be positive");
  const double a = order.alpha();
  double v = std::pow(x, -a);
  if (x > h) v -= std::pow(x - h, -a);
  return v;
}

double uniform_reliability_frac_derivative(double x, const FractionalOrder& order) {
  if (!(x > 0.0 && x <= 1.0)) throw InvalidInput("uniform_reliability_frac_derivative: x must lie in (0, 1]");
  const double a = order.alpha();
  return (std::pow(x, -a) - std::pow(x, 1.0 - a) / (1.0 - a)) / gamma_fn(1.0 - a);
}

std::string to_csv(const GridFunction& f, double alpha) {
  std::string out = "# grid=" + f.grading().label() + " alpha=" + format_double(alpha) + "\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += format_double(f.nodes()[i]);
    out += ',';
    out += format_double(f.values()[i]);
    out += '\n';
  }
  return out;
}

GridFunction grid_from_csv(const std::string& text, double* alpha) {
  std::istringstream in(text);
  std::string line;
  Grading grading;
  std::vector<double> nodes, values;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string tok;
      while (hdr >> tok) {
        if (tok.rfind("grid=", 0) == 0) grading = Grading::parse(tok.substr(5));
        if (tok.rfind("alpha=", 0) == 0 && alpha) *alpha = std::stod(tok.substr(6));
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("grid csv: missing comma on line " + std::to_string(lineno));
    try {
      nodes.push_back(std::stod(line.substr(0, comma)));
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw InvalidInput("grid csv: unparsable number on line " + std::to_string(lineno));
    }
  }
  return GridFunction(std::move(nodes), std::move(values), grading);
}

}  // namespace fracest
