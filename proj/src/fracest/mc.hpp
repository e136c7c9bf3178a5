#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fracest/rng.hpp"

namespace fracest {

struct McConfig {
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t n = 1000;
};

/// Output of an experiment. Every field is keyed so reports serialize with
/// a stable key order.
struct McReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> series;
  std::map<std::string, std::string> strings;
  std::map<std::string, bool> flags;

  /// Stores mean, variance, stderr of `values` under `prefix`.
  void add_moments(const std::string& prefix, const std::vector<double>& values);
};

/// Streaming mean / variance (Welford) with associative merge (Chan et al).
class Moments {
 public:
  void push(double x);
  void merge(const Moments& other);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 when fewer than two values.
  double variance() const;
  /// sqrt(variance / count); NaN when fewer than two values.
  double stderr_of_mean() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

Moments batch_moments(const std::vector<double>& values);

using ReplicationFn = std::function<std::vector<double>(Philox& rng, std::size_t rep)>;

/// Runs cfg.reps replications. Replication i draws from Philox(seed, i);
/// results are stored by index, so the output does not depend on the
/// worker count. A throwing replication is retried once on a fresh seed.
std::vector<std::vector<double>> run_replications(const McConfig& cfg, const ReplicationFn& fn);

/// Column `k` of the replication table.
std::vector<double> column(const std::vector<std::vector<double>>& table, std::size_t k);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool low_power = false;
};

/// One-sample KS against N(0, 1), asymptotic p with Stephens' correction.
KsResult ks_test_normal(std::vector<double> values);
/// Two-sample KS with the effective size n m / (n + m).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool ci_defined = false;
};

/// Least-squares line with a 95% t-interval for the slope.
SlopeFit slope_fit(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace fracest
