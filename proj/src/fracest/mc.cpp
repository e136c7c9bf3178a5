#include "fracest/mc.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "fracest/error.hpp"
#include "fracest/special.hpp"

namespace fracest {

void McReport::add_moments(const std::string& prefix, const std::vector<double>& values) {
  const Moments m = batch_moments(values);
  scalars[prefix + "_mean"] = m.mean();
  scalars[prefix + "_variance"] = m.variance();
  if (m.count() > 1) {
    scalars[prefix + "_stderr"] = m.stderr_of_mean();
  } else {
    flags[prefix + "_stderr_undefined"] = true;
  }
}

void Moments::push(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void Moments::merge(const Moments& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double d = other.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += other.m2_ + d * d * na * nb / n;
  n_ += other.n_;
}

double Moments::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double Moments::stderr_of_mean() const {
  if (n_ < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(variance() / static_cast<double>(n_));
}

Moments batch_moments(const std::vector<double>& values) {
  // Pairwise merge keeps rounding error logarithmic in the count.
  if (values.size() <= 64) {
    Moments m;
    for (double v : values) m.push(v);
    return m;
  }
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  Moments left = batch_moments(std::vector<double>(values.begin(), mid));
  left.merge(batch_moments(std::vector<double>(mid, values.end())));
  return left;
}

std::vector<std::vector<double>> run_replications(const McConfig& cfg, const ReplicationFn& fn) {
  if (cfg.reps == 0) throw InvalidInput("reps must be positive");
  if (cfg.workers == 0) throw InvalidInput("workers must be positive");
  std::vector<std::vector<double>> results(cfg.reps);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run_one = [&](std::size_t rep) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      try {
        Philox rng(derive_seed(cfg.seed, attempt), rep);
        results[rep] = fn(rng, rep);
        return;
      } catch (...) {
        if (attempt >= 1) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.workers, cfg.reps));
  if (workers == 1) {
    for (std::size_t i = 0; i < cfg.reps; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < cfg.reps; i += workers) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<double> column(const std::vector<std::vector<double>>& table, std::size_t k) {
  std::vector<double> out;
  out.reserve(table.size());
  for (const auto& row : table) out.push_back(row.at(k));
  return out;
}

KsResult ks_test_normal(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("ks_test_normal: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double nd = static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = normal_cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / nd - f, f - static_cast<double>(i) / nd});
  }
  KsResult r;
  r.statistic = d;
  r.n = n;
  r.low_power = n < 100;
  const double sn = std::sqrt(nd);
  r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size() + b.size();
  r.low_power = std::min(a.size(), b.size()) < 100;
  const double ne = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

SlopeFit slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvalidInput("slope_fit: xs and ys differ in length");
  if (xs.size() < 2) throw InvalidInput("slope_fit: need at least two points");
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidInput("slope_fit: xs are not distinct");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.ci_low = fit.ci_high = fit.slope;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - fit.intercept - fit.slope * xs[i];
      sse += r * r;
    }
    const double df = static_cast<double>(n - 2);
    const double se = std::sqrt(sse / df / sxx);
    const double t = boost::math::quantile(boost::math::students_t(df), 0.975);
    fit.ci_low = fit.slope - t * se;
    fit.ci_high = fit.slope + t * se;
    fit.ci_defined = true;
  }
  return fit;
}

}  // namespace fracest
