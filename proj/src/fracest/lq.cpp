#include "fracest/lq.hpp"

#include <algorithm>
#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

#include "fracest/error.hpp"
#include "fracest/special.hpp"

namespace fracest {

namespace {

void require_q(double q) {
  if (!(q >= 1.0)) throw InvalidInput("q must be >= 1");
}

boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  return ts;
}

const QuadratureRule& gl20() {
  static const QuadratureRule rule = gauss_legendre_unit(20);
  return rule;
}

}  // namespace

double g_alpha(double x, double alpha) { return std::pow(x, -alpha) - std::pow(x, 1.0 - alpha) / (1.0 - alpha); }

GridFunction centered_process_path(const Sample& s, const FractionalOrder& order, const std::vector<double>& nodes) {
  const double a = order.alpha();
  const double g = gamma_fn(1.0 - a);
  std::vector<double> sorted = s.values();
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double x = nodes[i];
    if (!(x > 0.0)) throw InvalidInput("process grid nodes must be positive");
    const double tail = std::pow(x, 1.0 - a) / (1.0 - a);
    // sum_i (f_{a,xi_i}(x) - g_a(x)) = n x^(1-a)/(1-a) - sum_{xi_i < x} (x - xi_i)^-a
    double acc = 0.0;
    for (double xi : sorted) {
      if (!(xi < x)) break;
      acc += std::pow(x - xi, -a);
    }
    out[i] = (n * tail - acc) / (std::sqrt(n) * g);
  }
  return GridFunction(nodes, std::move(out));
}

double lq_norm(const GridFunction& f, double q) {
  require_q(q);
  if (f.empty()) throw InvalidInput("lq_norm: empty grid");
  const auto& x = f.nodes();
  const auto& v = f.values();
  const double b = x.back();
  if (!(b > 0.0)) throw InvalidInput("lq_norm: grid must extend past 0");
  double acc = x[0] * std::pow(std::abs(v[0]), q);
  double prev = std::pow(std::abs(v[0]), q);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double cur = std::pow(std::abs(v[i]), q);
    acc += 0.5 * (x[i] - x[i - 1]) * (prev + cur);
    prev = cur;
  }
  return std::pow(acc / b, 1.0 / q);
}

Refinement lq_norm_refinement(const std::function<double(double)>& f, double q,
                              const std::function<std::vector<double>(std::size_t)>& make_nodes, std::size_t n0,
                              std::size_t levels) {
  if (levels < 4) throw InvalidInput("refinement needs at least four levels");
  Refinement out;
  for (std::size_t k = 0; k < levels; ++k) {
    const std::size_t n = n0 << k;
    out.intervals.push_back(n);
    out.norms.push_back(lq_norm(tabulate(make_nodes(n), f), q));
  }
  // Work with int |f|^q: its increments shrink geometrically when the
  // integral converges and grow once the singularity is non-integrable.
  const std::size_t m = out.norms.size();
  auto integral = [&](std::size_t i) { return std::pow(out.norms[i], q); };
  const double d1 = integral(m - 3) - integral(m - 4);
  const double d2 = integral(m - 2) - integral(m - 3);
  const double d3 = integral(m - 1) - integral(m - 2);
  out.diverging = d1 > 0.0 && d2 >= d1 && d3 >= d2;
  return out;
}

double deterministic_bound_K(const FractionalOrder& order, double q) {
  require_q(q);
  const double a = order.alpha();
  if (!(a * q < 1.0)) throw RegimeError("K(alpha, q) needs q < 1/alpha; the L_q loss is infinite beyond it");
  return std::pow(2.0, 1.0 - 1.0 / q) / gamma_fn(1.0 - a) *
         std::pow(std::pow(1.0 - a, -q) + 1.0 / (1.0 - a * q), 1.0 / q);
}

double rosenthal_constant(const FractionalOrder& order) {
  const double a = order.alpha();
  if (!order.estimation_regime()) throw RegimeError("Rosenthal constant needs alpha < 1/2");
  return kRosenthal * std::max(2.0 / std::log(2.0), (1.0 / a) / std::abs(std::log(a)));
}

double single_path_norm(double xi, const FractionalOrder& order, double q) {
  require_q(q);
  const double a = order.alpha();
  if (!(a * q < 1.0)) return std::numeric_limits<double>::infinity();
  const double g = gamma_fn(1.0 - a);
  xi = std::clamp(xi, 0.0, 1.0);
  const double e = q * (1.0 - a) + 1.0;
  double total = std::pow(xi, e) / (std::pow(1.0 - a, q) * e);
  const double L = 1.0 - xi;
  if (L > 0.0) {
    auto h = [&](double d) { return std::pow(xi + d, 1.0 - a) / (1.0 - a) - std::pow(d, -a); };
    double c = L;
    if (h(L) > 0.0) {
      std::uintmax_t iters = 200;
      const auto root = boost::math::tools::toms748_solve(
          [&](double logd) { return h(std::exp(logd)); }, std::log(L) - 200.0, std::log(L),
          boost::math::tools::eps_tolerance<double>(50), iters);
      c = std::exp(0.5 * (root.first + root.second));
    }
    // d = c v^k with k = 1/(1 - a q) absorbs d^-aq into the Jacobian.
    const double k = 1.0 / (1.0 - a * q);
    auto near = [&](double v) {
      const double d = c * std::pow(v, k);
      return std::pow(std::abs(1.0 - std::pow(xi + d, 1.0 - a) * std::pow(d, a) / (1.0 - a)), q);
    };
    total += k * std::pow(c, 1.0 - a * q) * integrator().integrate(near, 0.0, 1.0, 1e-13);
    if (L - c > 64.0 * std::numeric_limits<double>::epsilon() * L) {
      auto far = [&](double d) { return std::pow(std::abs(h(d)), q); };
      total += integrator().integrate(far, c, L, 1e-13);
    }
  }
  return std::pow(total, 1.0 / q) / g;
}

double w_q1_exact(const FractionalOrder& order, double q) {
  require_q(q);
  if (!(order.alpha() * q < 1.0)) return std::numeric_limits<double>::infinity();
  boost::math::quadrature::tanh_sinh<double> outer;
  const double m = outer.integrate([&](double xi) { return std::pow(single_path_norm(xi, order, q), q); }, 0.0, 1.0,
                                   1e-9);
  return std::pow(m, 1.0 / q);
}

double cross_moment(double x, double d, double alpha, const std::function<double(double)>& weight) {
  if (!(x > 0.0)) return 0.0;
  if (d == 0.0 && !weight) return std::pow(x, 1.0 - 2.0 * alpha) / (1.0 - 2.0 * alpha);
  // s = x v^k, k = 1/(1 - a): x^(1-a) k int_0^1 (x v^k + d)^-a dv. The
  // integrand turns over near v* = (d/x)^(1/k); pieces double from there.
  const double k = 1.0 / (1.0 - alpha);
  const QuadratureRule& rule = gl20();
  if (d == 0.0) {
    // s = x v^k2, k2 = 1/(1 - 2a): x^(1-2a) k2 int_0^1 w(x v^k2) dv
    const double k2 = 1.0 / (1.0 - 2.0 * alpha);
    const auto f = [&](double v) { return weight(x * std::pow(v, k2)); };
    double acc = graded_gauss_legendre(f, 0.125);
    for (int p = 1; p < 8; ++p) {
      const double lo = p / 8.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] / 8.0 * f(lo + rule.nodes[i] / 8.0);
    }
    return std::pow(x, 1.0 - 2.0 * alpha) * k2 * acc;
  }
  const double vstar = std::pow(d / x, 1.0 - alpha);
  auto piece = [&](double lo, double hi) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = lo + (hi - lo) * rule.nodes[i];
      const double sv = x * std::pow(v, k);
      const double w = weight ? weight(sv) : 1.0;
      acc += rule.weights[i] * std::pow(sv + d, -alpha) * w;
    }
    return acc * (hi - lo);
  };
  // v^k is not smooth at 0, so the first piece is graded toward it.
  double hi = std::min(1.0, vstar);
  double sum = graded_gauss_legendre(
      [&](double v) {
        const double sv = x * std::pow(v, k);
        return std::pow(sv + d, -alpha) * (weight ? weight(sv) : 1.0);
      },
      hi);
  if (hi >= 1.0) return std::pow(x, 1.0 - alpha) * k * sum;
  double lo = hi;
  hi = std::min(1.0, 2.0 * hi);
  while (true) {
    sum += piece(lo, hi);
    if (hi >= 1.0) break;
    lo = hi;
    hi = std::min(1.0, 2.0 * hi);
  }
  return std::pow(x, 1.0 - alpha) * k * sum;
}

double CovKernel::raw(double x, double y) const {
  if (!(x > 0.0) || !(y > 0.0)) return 0.0;
  const double a = order_.alpha();
  const double lo = std::min(x, y);
  const double prod = std::pow(x * y, 1.0 - a) / ((1.0 - a) * (1.0 - a));
  if (variant_ == Variant::ClosedR) return std::pow(lo, 1.0 - 2.0 * a) / (1.0 - 2.0 * a) - prod;
  return cross_moment(lo, std::abs(x - y), a) - prod;
}

double CovKernel::operator()(double x, double y) const {
  const double g = gamma_fn(1.0 - order_.alpha());
  return raw(x, y) / (g * g);
}

std::vector<double> CovKernel::matrix(const std::vector<double>& nodes) const {
  const std::size_t n = nodes.size();
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (*this)(nodes[i], nodes[j]);
      m[i * n + j] = v;
      m[j * n + i] = v;
    }
  }
  return m;
}

double CovKernel::exact_raw_product_integration(double x, double y, std::size_t intervals) const {
  const double a = order_.alpha();
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  if (!(lo > 0.0)) return 0.0;
  const double prod = std::pow(x * y, 1.0 - a) / ((1.0 - a) * (1.0 - a));
  if (lo == hi) return std::pow(lo, 1.0 - 2.0 * a) / (1.0 - 2.0 * a) - prod;
  // int_0^lo (lo - t)^-a (hi - t)^-a dt = Gamma(1 - a) I^(1-a)[(hi - .)^-a](lo),
  // nodes clustered toward lo where the data steepen.
  std::vector<double> t(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    const double s = 1.0 - static_cast<double>(k) / static_cast<double>(intervals);
    t[k] = lo * (1.0 - s * s);
  }
  t.back() = lo;
  const GridFunction f = tabulate(t, [&](double s) { return std::pow(hi - s, -a); });
  const GridFunction If = frac_integral(f, FractionalOrder(1.0 - a));
  return gamma_fn(1.0 - a) * If.values().back() - prod;
}

McReport empirical_loss_ladder(const FractionalOrder& order, const std::vector<double>& qs, std::size_t n,
                               const ClosedForm& law, const McConfig& cfg, std::size_t grid_points) {
  if (qs.empty()) throw InvalidInput("loss: empty q list");
  if (n == 0 || grid_points == 0) throw InvalidInput("loss: n and grid size must be positive");
  const double a = order.alpha();
  for (double q : qs) {
    require_q(q);
    if (!(a * q < 1.0)) throw RegimeError("loss: q >= 1/alpha, the L_q loss is infinite");
  }
  const double g = gamma_fn(1.0 - a);
  std::vector<double> xs(grid_points), truth(grid_points), base(grid_points);
  for (std::size_t j = 0; j < grid_points; ++j) {
    xs[j] = law.quantile((static_cast<double>(j) + 0.5) / static_cast<double>(grid_points));
    truth[j] = law.reliability_frac_derivative(xs[j], order);
    base[j] = std::pow(xs[j], -a);
  }
  const double nd = static_cast<double>(n);
  const double sqn = std::sqrt(nd);
  const auto table = run_replications(cfg, [&](Philox& rng, std::size_t) {
    std::vector<double> sample(n);
    for (double& v : sample) v = law.quantile(rng.uniform());
    std::sort(sample.begin(), sample.end());
    std::vector<double> acc(qs.size(), 0.0);
    for (std::size_t j = 0; j < grid_points; ++j) {
      double s = 0.0;
      for (double xi : sample) {
        if (!(xi < xs[j])) break;
        s += std::pow(xs[j] - xi, -a);
      }
      const double z = std::abs(sqn * ((base[j] - s / nd) / g - truth[j]));
      for (std::size_t k = 0; k < qs.size(); ++k) acc[k] += std::pow(z, qs[k]);
    }
    for (double& v : acc) v /= static_cast<double>(grid_points);
    return acc;
  });

  McReport rep;
  rep.experiment = "loss";
  rep.seed = cfg.seed;
  rep.reps = cfg.reps;
  rep.scalars["alpha"] = a;
  rep.scalars["n"] = nd;
  rep.scalars["grid_points"] = static_cast<double>(grid_points);
  rep.strings["law"] = law.name();
  const double kr = order.estimation_regime() ? rosenthal_constant(order) : 0.0;
  rep.scalars["k_rosenthal"] = kr;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const Moments m = batch_moments(column(table, k));
    const double q = qs[k];
    const double w = std::pow(m.mean(), 1.0 / q);
    const double se = cfg.reps > 1 ? std::pow(m.mean(), 1.0 / q - 1.0) * m.stderr_of_mean() / q : 0.0;
    const double kq = deterministic_bound_K(order, q);
    rep.series["q"].push_back(q);
    rep.series["w_qn"].push_back(w);
    rep.series["w_qn_stderr"].push_back(se);
    rep.series["k_alpha_q"].push_back(kq);
    rep.series["bound"].push_back(kq * kr);
  }
  return rep;
}

McReport empirical_loss(const LossSpec& spec, const ClosedForm& law, const McConfig& cfg, std::size_t grid_points) {
  require_q(spec.q);
  if (!spec.valid()) {
    throw RegimeError("loss: q >= 1/alpha, where W_{q,n} is infinite for every n");
  }
  McConfig c = cfg;
  c.reps = spec.reps;
  c.n = spec.n;
  McReport ladder = empirical_loss_ladder(spec.order, {spec.q}, spec.n, law, c, grid_points);
  McReport rep;
  rep.experiment = "loss";
  rep.seed = c.seed;
  rep.reps = c.reps;
  rep.scalars = ladder.scalars;
  rep.strings = ladder.strings;
  rep.scalars["q"] = spec.q;
  rep.scalars["w_qn"] = ladder.series["w_qn"][0];
  rep.scalars["w_qn_stderr"] = ladder.series["w_qn_stderr"][0];
  rep.scalars["k_alpha_q"] = ladder.series["k_alpha_q"][0];
  rep.scalars["bound"] = ladder.series["bound"][0];
  rep.flags["rosenthal_branch"] = spec.rosenthal_branch();
  rep.flags["pass"] = rep.scalars["w_qn"] <= rep.scalars["bound"];
  return rep;
}

LimitProcess::LimitProcess(const CovKernel& kernel, std::vector<double> nodes)
    : nodes_(std::move(nodes)), sampler_(kernel.matrix(nodes_), nodes_.size()) {}

std::vector<double> LimitProcess::sample_norms(double q, const McConfig& cfg) const {
  require_q(q);
  const auto table = run_replications(cfg, [&](Philox& rng, std::size_t) {
    std::vector<double> path;
    sampler_.sample(rng, path);
    return std::vector<double>{lq_norm(GridFunction(nodes_, std::move(path)), q)};
  });
  return column(table, 0);
}

double LimitProcess::tail_probability(double q, double u, const McConfig& cfg) const {
  if (u <= 0.0) return 1.0;
  const auto norms = sample_norms(q, cfg);
  const auto hits = std::count_if(norms.begin(), norms.end(), [&](double v) { return v > u; });
  return static_cast<double>(hits) / static_cast<double>(norms.size());
}

std::vector<double> limit_grid(const FractionalOrder& order, std::size_t points) {
  auto nodes = graded_nodes(1.0, points, default_grading(order));
  nodes.erase(nodes.begin());
  return nodes;
}

double ks_exact_cdf(std::size_t n, double d) {
  if (n == 0) throw InvalidInput("ks_exact_cdf: n must be positive");
  const double nd = static_cast<double>(n);
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const auto k = static_cast<std::size_t>(std::floor(nd * d)) + 1;
  const std::size_t m = 2 * k - 1;
  const double h = static_cast<double>(k) - nd * d;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i + 1 >= j) H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    H(static_cast<Eigen::Index>(i), 0) -= std::pow(h, static_cast<double>(i + 1));
    H(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(i)) -= std::pow(h, static_cast<double>(m - i));
  }
  if (2.0 * h - 1.0 > 0.0) H(static_cast<Eigen::Index>(m - 1), 0) += std::pow(2.0 * h - 1.0, static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i + 1 > j) {
        H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /= std::tgamma(static_cast<double>(i - j + 2));
      }
    }
  }
  // H^n by squaring; entries are rescaled by 2^-e so the power stays finite.
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(H.rows(), H.cols());
  Eigen::MatrixXd base = H;
  long exponent = 0;
  long base_exponent = 0;
  auto renormalize = [](Eigen::MatrixXd& a, long& e) {
    const double peak = a.cwiseAbs().maxCoeff();
    if (peak > 0.0) {
      int shift = 0;
      std::frexp(peak, &shift);
      a *= std::ldexp(1.0, -shift);
      e += shift;
    }
  };
  for (std::size_t p = n; p > 0; p >>= 1) {
    if (p & 1) {
      result = result * base;
      exponent += base_exponent;
      renormalize(result, exponent);
    }
    if (p > 1) {
      base = base * base;
      base_exponent *= 2;
      renormalize(base, base_exponent);
    }
  }
  // n!/n^n accumulated in log space.
  const double log_scale = std::lgamma(nd + 1.0) - nd * std::log(nd);
  const double s = result(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k - 1));
  if (s <= 0.0) return 0.0;
  const double value = std::exp(std::log(s) + static_cast<double>(exponent) * std::log(2.0) + log_scale);
  return std::clamp(value, 0.0, 1.0);
}

McReport kiefer_bound_check(std::size_t n, const std::vector<double>& us, const McConfig& cfg) {
  if (n == 0) throw InvalidInput("kiefer: n must be positive");
  for (double u : us) {
    if (!(u >= 1.0)) throw InvalidInput("kiefer: the exponential bound is stated for u >= 1");
  }
  const double nd = static_cast<double>(n);
  const auto table = run_replications(cfg, [&](Philox& rng, std::size_t) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform();
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d = std::max({d, static_cast<double>(i + 1) / nd - x[i], x[i] - static_cast<double>(i) / nd});
    }
    return std::vector<double>{std::sqrt(nd) * d};
  });
  const auto stat = column(table, 0);
  McReport rep;
  rep.experiment = "kiefer";
  rep.seed = cfg.seed;
  rep.reps = cfg.reps;
  rep.scalars["n"] = nd;
  bool pass = true;
  for (double u : us) {
    const double p = static_cast<double>(std::count_if(stat.begin(), stat.end(), [&](double v) { return v > u; })) /
                     static_cast<double>(stat.size());
    const double bound = 2.0 * std::exp(-2.0 * u * u);
    rep.series["u"].push_back(u);
    rep.series["exceedance"].push_back(p);
    rep.series["exceedance_stderr"].push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(stat.size())));
    rep.series["bound"].push_back(bound);
    rep.series["exact_exceedance"].push_back(1.0 - ks_exact_cdf(n, u / std::sqrt(nd)));
    pass = pass && p <= bound;
  }
  rep.flags["pass"] = pass;
  return rep;
}

double psi_alpha(double q, double alpha) { return std::pow(1.0 - alpha * q, -1.0 / q); }

std::vector<double> gls_q_grid(double alpha) {
  constexpr std::size_t kPoints = 32;
  const double lo = 1.01;
  const double hi = 0.99 / alpha;
  std::vector<double> qs(kPoints);
  for (std::size_t i = 0; i < kPoints; ++i) {
    qs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(kPoints - 1));
  }
  return qs;
}

GlsNorm gls_norm(const GridFunction& f, const FractionalOrder& order) {
  const double a = order.alpha();
  GlsNorm out;
  out.support = 1.0 / a;
  out.qs = gls_q_grid(a);
  for (double q : out.qs) {
    const double r = lq_norm(f, q) / psi_alpha(q, a);
    out.ratios.push_back(r);
    if (r > out.value || out.ratios.size() == 1) {
      out.value = r;
      out.argmax_q = q;
    }
  }
  return out;
}

TailDiagnostic joint_tail(const FractionalOrder& order, std::size_t draws, std::uint64_t seed, double fit_from) {
  if (draws < 100) throw InvalidInput("joint tail needs at least 100 draws");
  const double a = order.alpha();
  const double g = gamma_fn(1.0 - a);
  constexpr double kPower = 8.0;
  std::vector<double> dev(draws), weight(draws);
  Philox rng(seed, 0);
  for (std::size_t i = 0; i < draws; ++i) {
    const double x = rng.uniform();
    // s = (x - xi) / x for xi < x; s > 1 means xi >= x.
    double s = 2.0;
    if (rng.uniform() < 0.5) {
      s = std::pow(rng.uniform(), kPower);
    } else {
      const double xi = rng.uniform();
      if (xi < x) s = 1.0 - xi / x;
    }
    double q = 1.0;
    double z = std::pow(x, 1.0 - a) / (1.0 - a);
    if (s <= 1.0) {
      q += std::pow(s, 1.0 / kPower - 1.0) / (kPower * x);
      const double gap = x * s;
      if (gap > 0.0) z -= std::pow(gap, -a);
    }
    weight[i] = 2.0 / q;
    dev[i] = std::abs(z) / g;
  }
  TailDiagnostic out = weighted_exceedance(dev, weight, geometric_levels(1.0), fit_from);
  out.delta = 1.0;
  out.expected_slope = -1.0 / a;
  return out;
}

}  // namespace fracest
