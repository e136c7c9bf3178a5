#include "fracest/spectral.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "fracest/error.hpp"
#include "fracest/fft.hpp"
#include "fracest/gaussian.hpp"
#include "fracest/lq.hpp"
#include "fracest/special.hpp"

namespace fracest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// int_0^x s^-p w(s) ds for p < 1, via s = x v^(1/(1-p)).
double power_moment(double x, double p, const std::function<double(double)>& w) {
  if (!(x > 0.0)) return 0.0;
  static const QuadratureRule rule = gauss_legendre_unit(20);
  const double k = 1.0 / (1.0 - p);
  const auto f = [&](double v) { return w(x * std::pow(v, k)); };
  double acc = graded_gauss_legendre(f, 0.125);
  for (int piece = 1; piece < 8; ++piece) {
    const double lo = piece / 8.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] / 8.0 * f(lo + rule.nodes[i] / 8.0);
  }
  return std::pow(x, 1.0 - p) * k * acc;
}

void require_lambda(double l) {
  if (!(l > 0.0 && l <= kTwoPi)) throw InvalidInput("lambda must lie in (0, 2 pi]");
}

std::vector<double> bin_edges(std::size_t n) {
  const double half = std::numbers::pi / static_cast<double>(n);
  std::vector<double> edges;
  edges.reserve(n + 2);
  edges.push_back(0.0);
  for (std::size_t j = 0; j < n; ++j) edges.push_back((2.0 * static_cast<double>(j) + 1.0) * half);
  edges.push_back(kTwoPi);
  return edges;
}

std::vector<double> bin_levels(const std::vector<double>& j_values, bool square) {
  std::vector<double> levels(j_values.begin(), j_values.end());
  levels.push_back(j_values.front());
  if (square) {
    for (double& v : levels) v *= v;
  }
  return levels;
}

}  // namespace

SpectralModel SpectralModel::white() { return {Kind::White, 0.0}; }

SpectralModel SpectralModel::ar1(double rho) {
  if (!(std::abs(rho) < 1.0)) throw InvalidInput("ar1 model needs |rho| < 1");
  return {Kind::Ar1, rho};
}

SpectralModel SpectralModel::parse(const std::string& spec) {
  if (spec == "white") return white();
  if (spec.rfind("ar1:", 0) == 0) {
    try {
      std::size_t pos = 0;
      const std::string tail = spec.substr(4);
      const double rho = std::stod(tail, &pos);
      if (pos != tail.size()) throw std::invalid_argument(tail);
      return ar1(rho);
    } catch (const InvalidInput&) {
      throw;
    } catch (const std::exception&) {
      throw InvalidInput("bad ar1 coefficient in '" + spec + "'");
    }
  }
  throw InvalidInput("unknown spectral model '" + spec + "' (expected white or ar1:RHO)");
}

std::string SpectralModel::name() const {
  if (kind_ == Kind::White) return "white";
  std::ostringstream os;
  os.precision(17);
  os << "ar1:" << rho_;
  return os.str();
}

double SpectralModel::density(double lambda) const {
  if (kind_ == Kind::White) return 1.0 / kTwoPi;
  const double r = rho_;
  return (1.0 - r * r) / (kTwoPi * (1.0 - 2.0 * r * std::cos(lambda) + r * r));
}

double SpectralModel::covariance(long m) const {
  if (kind_ == Kind::White) return m == 0 ? 1.0 : 0.0;
  return std::pow(rho_, static_cast<double>(std::labs(m)));
}

SeriesGenerator::SeriesGenerator(const SpectralModel& model, std::size_t n) : n_(n) {
  if (n < 2) throw InvalidInput("series length must be at least 2");
  std::size_t m = 1;
  while (m < 2 * (n - 1)) m *= 2;
  for (; m <= 16 * n; m *= 2) {
    std::vector<std::complex<double>> c(m);
    for (std::size_t j = 0; j < m; ++j) {
      const long lag = j <= m / 2 ? static_cast<long>(j) : static_cast<long>(m - j);
      c[j] = model.covariance(lag);
    }
    dft(c, true);
    double top = 0.0, low = 0.0;
    for (const auto& v : c) {
      top = std::max(top, v.real());
      low = std::min(low, v.real());
    }
    if (low >= -1e-10 * top) {
      m_ = m;
      sqrt_eig_.resize(m);
      for (std::size_t k = 0; k < m; ++k) sqrt_eig_[k] = std::sqrt(std::max(0.0, c[k].real()) / static_cast<double>(m));
      return;
    }
  }
  if (n > 4096) throw NumericalError("circulant embedding not PSD up to 16 n and n > 4096 rules out dense factorization");
  dense_ = true;
  std::vector<double> cov(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cov[i * n + j] = model.covariance(static_cast<long>(i) - static_cast<long>(j));
  }
  lower_ = GaussianSampler(cov, n).lower();
}

void SeriesGenerator::generate(Philox& rng, std::vector<double>& out) const {
  out.assign(n_, 0.0);
  if (dense_) {
    std::vector<double> z(n_);
    for (double& v : z) v = rng.normal();
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc += lower_[i * n_ + j] * z[j];
      out[i] = acc;
    }
    return;
  }
  // Real part of F (sqrt(eig / m) (A + iB)) has covariance exactly C.
  std::vector<std::complex<double>> w(m_);
  for (std::size_t k = 0; k < m_; ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    w[k] = sqrt_eig_[k] * std::complex<double>(re, im);
  }
  dft(w, true);
  for (std::size_t j = 0; j < n_; ++j) out[j] = w[j].real();
}

GaussianSeries generate_series(const SpectralModel& model, std::size_t n, std::uint64_t seed) {
  SeriesGenerator gen(model, n);
  Philox rng(seed, 0);
  GaussianSeries s;
  s.model = model.name();
  s.seed = seed;
  gen.generate(rng, s.values);
  return s;
}

GridFunction periodogram(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 2) throw InvalidInput("periodogram needs at least two values");
  std::vector<std::complex<double>> x(series.begin(), series.end());
  dft(x, true);
  std::vector<double> nodes(n), values(n);
  const double scale = 1.0 / (kTwoPi * static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    nodes[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    values[j] = std::norm(x[j]) * scale;
  }
  return GridFunction(std::move(nodes), std::move(values));
}

std::vector<double> default_lambda_grid(std::size_t points, double lambda_max) {
  if (points == 0) throw InvalidInput("lambda grid needs at least one point");
  require_lambda(lambda_max);
  std::vector<double> grid(points);
  for (std::size_t j = 0; j < points; ++j) {
    grid[j] = lambda_max * static_cast<double>(j + 1) / static_cast<double>(points);
  }
  return grid;
}

std::vector<double> spectral_estimate_values(const GridFunction& pg, const FractionalOrder& order,
                                             const std::vector<double>& lambda_grid) {
  for (double l : lambda_grid) require_lambda(l);
  return frac_integral_step(bin_edges(pg.size()), bin_levels(pg.values(), false), FractionalOrder(1.0 - order.alpha()),
                            lambda_grid);
}

SpectralEstimate estimate_spectral_frac_derivative(const std::vector<double>& series, const FractionalOrder& order,
                                                   const std::vector<double>& lambda_grid) {
  if (!order.estimation_regime()) throw RegimeError("spectral estimator needs alpha < 1/2");
  SpectralEstimate est;
  est.lambda_grid = lambda_grid;
  est.values = spectral_estimate_values(periodogram(series), order, lambda_grid);
  return est;
}

double spectral_truth(const SpectralModel& model, const FractionalOrder& order, double lambda) {
  require_lambda(lambda);
  const double a = order.alpha();
  if (model.kind() == SpectralModel::Kind::White) {
    return std::pow(lambda, 1.0 - a) / (kTwoPi * gamma_fn(2.0 - a));
  }
  return power_moment(lambda, a, [&](double s) { return model.density(lambda - s); }) / gamma_fn(1.0 - a);
}

std::vector<double> expected_periodogram(const SpectralModel& model, std::size_t n) {
  if (n < 2) throw InvalidInput("periodogram needs n >= 2");
  // Fold lags m and m - n, which share exp(i m l_j).
  const double nd = static_cast<double>(n);
  std::vector<std::complex<double>> a(n);
  a[0] = model.covariance(0);
  for (std::size_t m = 1; m < n; ++m) {
    const double md = static_cast<double>(m);
    a[m] = (1.0 - md / nd) * model.covariance(static_cast<long>(m)) +
           (md / nd) * model.covariance(static_cast<long>(n - m));
  }
  dft(a, true);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = a[j].real() / kTwoPi;
  return out;
}

std::vector<double> expected_estimate(const SpectralModel& model, const FractionalOrder& order, std::size_t n,
                                      const std::vector<double>& lambda_grid) {
  for (double l : lambda_grid) require_lambda(l);
  return frac_integral_step(bin_edges(n), bin_levels(expected_periodogram(model, n), false),
                            FractionalOrder(1.0 - order.alpha()), lambda_grid);
}

double theta_covariance(const SpectralModel& model, const FractionalOrder& order, double l1, double l2) {
  require_lambda(l1);
  require_lambda(l2);
  const double a = order.alpha();
  const double g = gamma_fn(1.0 - a);
  const double m = std::min(l1, l2);
  const double d = std::abs(l1 - l2);
  const double integral = cross_moment(m, d, a, [&](double s) {
    const double f = model.density(m - s);
    return f * f;
  });
  return 2.0 * kTwoPi / (g * g) * integral;
}

double theta_limit_covariance(const SpectralModel& model, const FractionalOrder& order, double l1, double l2) {
  const double a = order.alpha();
  const double g = gamma_fn(1.0 - a);
  double value = 0.5 * theta_covariance(model, order, l1, l2);
  // Reflected term: v < l1 and 2 pi - v < l2.
  const double lo = kTwoPi - l2;
  if (l1 > lo) {
    const double len = l1 - lo;
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    auto integrand = [&](double t, double tc) {
      const double one_minus = tc > 0.0 ? tc : 1.0 - t;
      const double tt = tc < 0.0 ? -tc : t;
      const double f = model.density(lo + len * t);
      return std::pow(one_minus, -a) * std::pow(tt, -a) * f * f;
    };
    value += kTwoPi / (g * g) * std::pow(len, 1.0 - 2.0 * a) * ts.integrate(integrand, 0.0, 1.0, 1e-12);
  }
  return value;
}

Band uniform_confidence_band(const SpectralModel& model, const FractionalOrder& order, std::size_t n, double level,
                             const std::vector<double>& lambda_grid, ThetaVariant variant, const McConfig& cfg) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("band level must lie in (0, 1)");
  if (!order.estimation_regime()) throw RegimeError("spectral band needs alpha < 1/2");
  if (n == 0) throw InvalidInput("band: n must be positive");
  const std::size_t k = lambda_grid.size();
  std::vector<double> cov(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = variant == ThetaVariant::Nominal
                           ? theta_covariance(model, order, lambda_grid[i], lambda_grid[j])
                           : theta_limit_covariance(model, order, lambda_grid[i], lambda_grid[j]);
      cov[i * k + j] = v;
      cov[j * k + i] = v;
    }
  }
  Band band;
  band.lambda_grid = lambda_grid;
  band.level = level;
  band.variant = variant;
  for (std::size_t i = 0; i < k; ++i) band.sigma2_max = std::max(band.sigma2_max, cov[i * k + i]);
  const GaussianSampler sampler(cov, k);
  const auto table = run_replications(cfg, [&](Philox& rng, std::size_t) {
    std::vector<double> path;
    sampler.sample(rng, path);
    double mx = 0.0;
    for (double v : path) mx = std::max(mx, std::abs(v));
    return std::vector<double>{mx};
  });
  std::vector<double> maxima = column(table, 0);
  std::sort(maxima.begin(), maxima.end());
  const auto idx = static_cast<std::size_t>(std::ceil(level * static_cast<double>(maxima.size()))) - 1;
  band.u0 = maxima[std::min(idx, maxima.size() - 1)];
  band.halfwidth = band.u0 / std::sqrt(static_cast<double>(n));
  return band;
}

double plugin_I2alpha_f2(const GridFunction& pg, const FractionalOrder& order, double lambda) {
  require_lambda(lambda);
  if (!order.estimation_regime()) throw RegimeError("plug-in needs alpha < 1/2");
  return frac_integral_step(bin_edges(pg.size()), bin_levels(pg.values(), true), FractionalOrder(2.0 * order.alpha()),
                            {lambda})[0];
}

double i2alpha_f2_truth(const SpectralModel& model, const FractionalOrder& order, double lambda) {
  require_lambda(lambda);
  const double a = order.alpha();
  if (model.kind() == SpectralModel::Kind::White) {
    return std::pow(lambda, 2.0 * a) / (kTwoPi * kTwoPi * gamma_fn(1.0 + 2.0 * a));
  }
  return power_moment(lambda, 1.0 - 2.0 * a,
                      [&](double s) {
                        const double f = model.density(lambda - s);
                        return f * f;
                      }) /
         gamma_fn(2.0 * a);
}

}  // namespace fracest
