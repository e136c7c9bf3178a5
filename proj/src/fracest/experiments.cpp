#include "fracest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "fracest/error.hpp"
#include "fracest/estimator.hpp"
#include "fracest/laws.hpp"
#include "fracest/lq.hpp"
#include "fracest/multivariate.hpp"
#include "fracest/special.hpp"
#include "fracest/spectral.hpp"

namespace fracest {

namespace {

constexpr double kPi = std::numbers::pi;

class Args {
 public:
  explicit Args(const Params& p) : p_(p) {}

  std::string str(const std::string& key, const std::string& def) {
    used_.insert(key);
    const auto it = p_.find(key);
    return it == p_.end() ? def : it->second;
  }

  double num(const std::string& key, double def) {
    const auto it = p_.find(key);
    used_.insert(key);
    if (it == p_.end()) return def;
    return to_double(key, it->second);
  }

  std::size_t count(const std::string& key, std::size_t def) {
    const double v = num(key, static_cast<double>(def));
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) throw InvalidInput("'" + key + "' must be a positive integer");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> list(const std::string& key, const std::string& def) {
    const std::string text = str(key, def);
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) throw InvalidInput("'" + key + "' is an empty list");
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : p_) {
      if (!used_.count(k)) throw InvalidInput("unknown parameter '" + k + "' for this experiment");
    }
  }

 private:
  static double to_double(const std::string& key, const std::string& text) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      while (pos < text.size() && text[pos] == ' ') ++pos;
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw InvalidInput("'" + key + "' expects a number, got '" + text + "'");
    }
  }

  const Params& p_;
  std::set<std::string> used_;
};

struct Context {
  Args args;
  std::uint64_t seed;
  unsigned workers;

  McConfig config(std::size_t reps, std::size_t n = 1) const {
    McConfig c;
    c.reps = reps;
    c.seed = seed;
    c.workers = workers;
    c.n = n;
    return c;
  }
};

McReport start(const std::string& name, const Context& ctx, std::size_t reps) {
  McReport r;
  r.experiment = name;
  r.seed = ctx.seed;
  r.reps = reps;
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------- calculus

McReport abel_inversion(Context& ctx) {
  const FractionalOrder order(ctx.args.num("alpha", 0.3));
  const double h = ctx.args.num("h", 0.5);
  const std::size_t nodes = ctx.args.count("nodes", 4096);
  const double widths = ctx.args.num("exclusion", 5.0);
  ctx.args.finish();
  if (!(h > 0.0 && h < 1.0)) throw InvalidInput("jump location must lie in (0, 1)");
  const auto law = ClosedForm::indicator_cdf(h);
  const auto grid = composite_nodes(1.0, nodes - 1, {h}, default_grading(order));
  const auto g = tabulate(grid, [&](double x) { return x > 0.0 ? law.frac_derivative_of_function(x, order) : 0.0; });
  const auto back = frac_integral(g, order);
  const double mesh = 1.0 / static_cast<double>(nodes);
  const auto jump = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), h) - grid.begin());
  const auto cells = static_cast<std::size_t>(widths);
  double sup = 0.0, sup_local = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double err = std::abs(back.values()[i] - law.function_value(x));
    if (std::abs(x - h) > widths * mesh && err > sup) {
      sup = err;
      worst = x;
    }
    // Stricter variant: only `cells` graded cells either side of h are dropped.
    const std::size_t dist = i > jump ? i - jump : jump - i;
    if (dist > cells) sup_local = std::max(sup_local, err);
  }
  McReport r = start("abel-inversion", ctx, 0);
  r.scalars["alpha"] = order.alpha();
  r.scalars["h"] = h;
  r.scalars["nodes"] = static_cast<double>(grid.size());
  r.scalars["mesh_width"] = mesh;
  r.scalars["sup_error"] = sup;
  r.scalars["sup_error_at"] = worst;
  r.scalars["sup_error_local_cells"] = sup_local;
  r.strings["grid"] = Grading{Grading::Kind::Composite, default_grading(order)}.label();
  r.flags["pass"] = sup <= 1e-3;
  return r;
}

// ---------------------------------------------------------------- point estimator

McReport point_mc(const std::string& name, Context& ctx) {
  const auto law = ClosedForm::parse(ctx.args.str("law", "uniform"));
  const auto alphas = ctx.args.list("alphas", "0.1,0.25,0.4");
  const auto xs = ctx.args.list("xs", "0.2,0.5,0.9");
  const std::size_t n = ctx.args.count("n", 1000);
  const std::size_t reps = ctx.args.count("reps", 20000);
  ctx.args.finish();
  std::vector<FractionalOrder> orders;
  for (double a : alphas) {
    orders.emplace_back(a);
    if (!orders.back().estimation_regime()) throw RegimeError("estimator needs alpha < 1/2");
  }
  for (double x : xs) {
    if (!(x > 0.0)) throw InvalidInput("evaluation points must be positive");
  }
  const auto table = run_replications(ctx.config(reps, n), [&](Philox& rng, std::size_t) {
    std::vector<double> sample(n);
    for (double& v : sample) v = law.quantile(rng.uniform());
    const Sample s(std::move(sample));
    std::vector<double> row;
    for (const auto& o : orders) {
      for (double x : xs) row.push_back(estimate_point(s, x, o));
    }
    return row;
  });
  McReport r = start(name, ctx, reps);
  r.strings["law"] = law.name();
  r.scalars["n"] = static_cast<double>(n);
  auto& s_alpha = r.series["alpha"];
  auto& s_x = r.series["x"];
  auto& s_mean = r.series["mean"];
  auto& s_se = r.series["stderr"];
  auto& s_truth = r.series["truth"];
  auto& s_z = r.series["z"];
  auto& s_nvar = r.series["n_var"];
  auto& s_target = r.series["var_target"];
  auto& s_rel = r.series["var_rel_error"];
  auto& s_ks = r.series["ks_statistic"];
  auto& s_p = r.series["ks_p"];
  std::size_t col = 0;
  for (const auto& o : orders) {
    const double g = gamma_fn(1.0 - o.alpha());
    for (double x : xs) {
      auto values = column(table, col++);
      const Moments m = batch_moments(values);
      const double truth = law.reliability_frac_derivative(x, o);
      const double target = sigma2_alpha_exact(law, x, o) / (g * g);
      const double nvar = static_cast<double>(n) * m.variance();
      s_alpha.push_back(o.alpha());
      s_x.push_back(x);
      s_mean.push_back(m.mean());
      s_se.push_back(m.stderr_of_mean());
      s_truth.push_back(truth);
      s_z.push_back((m.mean() - truth) / m.stderr_of_mean());
      s_nvar.push_back(nvar);
      s_target.push_back(target);
      s_rel.push_back(nvar / target - 1.0);
      const double sd = std::sqrt(target / static_cast<double>(n));
      for (double& v : values) v = (v - truth) / sd;
      const KsResult ks = ks_test_normal(std::move(values));
      s_ks.push_back(ks.statistic);
      s_p.push_back(ks.p_value);
    }
  }
  r.scalars["max_abs_z"] = max_abs(s_z);
  r.scalars["max_var_rel_error"] = max_abs(s_rel);
  r.scalars["min_ks_p"] = *std::min_element(s_p.begin(), s_p.end());
  r.flags["unbiased_pass"] = r.scalars["max_abs_z"] <= 3.0;
  r.flags["variance_pass"] = r.scalars["max_var_rel_error"] <= 0.05;
  r.flags["clt_pass"] = r.scalars["min_ks_p"] > 0.01;
  return r;
}

McReport coverage(Context& ctx) {
  const auto law = ClosedForm::parse(ctx.args.str("law", "uniform"));
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const double x = ctx.args.num("x", 0.5);
  const double level = ctx.args.num("level", 0.95);
  const std::size_t n = ctx.args.count("n", 10000);
  const std::size_t reps = ctx.args.count("reps", 5000);
  ctx.args.finish();
  const double truth = law.reliability_frac_derivative(x, order);
  const auto table = run_replications(ctx.config(reps, n), [&](Philox& rng, std::size_t) {
    std::vector<double> sample(n);
    for (double& v : sample) v = law.quantile(rng.uniform());
    const PointEstimate est = confidence_interval(Sample(std::move(sample)), x, order, level);
    return std::vector<double>{est.ci_low <= truth && truth <= est.ci_high ? 1.0 : 0.0,
                               est.variance_clamped ? 1.0 : 0.0, est.ci_high - est.ci_low};
  });
  McReport r = start("coverage", ctx, reps);
  const Moments hit = batch_moments(column(table, 0));
  r.strings["law"] = law.name();
  r.scalars["alpha"] = order.alpha();
  r.scalars["x"] = x;
  r.scalars["n"] = static_cast<double>(n);
  r.scalars["level"] = level;
  r.scalars["truth"] = truth;
  r.scalars["coverage"] = hit.mean();
  r.scalars["coverage_stderr"] = hit.stderr_of_mean();
  r.scalars["clamped_fraction"] = batch_moments(column(table, 1)).mean();
  r.scalars["mean_width"] = batch_moments(column(table, 2)).mean();
  r.flags["pass"] = std::abs(hit.mean() - level) <= 0.02;
  return r;
}

McReport tail_slope(Context& ctx) {
  const std::string law_kind = ctx.args.str("law", "cusp");
  const auto deltas = ctx.args.list("deltas", "1,0.5");
  const double m = ctx.args.num("center", 0.5);
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const double x = ctx.args.num("x", 0.5);
  const std::size_t draws = ctx.args.count("draws", 1000000);
  const double fit_from = ctx.args.num("fit_from", 30.0);
  ctx.args.finish();
  McReport r = start("tail-slope", ctx, draws);
  r.scalars["alpha"] = order.alpha();
  r.scalars["x"] = x;
  bool pass = true;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double d = deltas[k];
    ClosedForm law = law_kind == "cusp"    ? ClosedForm::power_cusp(d, m)
                     : law_kind == "power" ? ClosedForm::power_cdf(d, 1.0)
                                           : throw InvalidInput("tail law must be cusp or power");
    TailConfig tc;
    tc.draws = draws;
    tc.seed = derive_seed(ctx.seed, k);
    tc.fit_from = fit_from;
    const TailDiagnostic t = tail_diagnostic(law, x, order, tc);
    r.series["delta"].push_back(d);
    r.series["expected_slope"].push_back(t.expected_slope);
    r.series["fitted_slope"].push_back(t.fitted_slope);
    r.series["slope_ci_low"].push_back(t.slope_ci_low);
    r.series["slope_ci_high"].push_back(t.slope_ci_high);
    r.series["fit_points"].push_back(static_cast<double>(t.fit_points));
    pass = pass && t.estimable && std::abs(t.fitted_slope - t.expected_slope) <= 0.3;
  }
  r.strings["law"] = law_kind;
  r.flags["pass"] = pass;
  return r;
}

// ---------------------------------------------------------------- L_q analysis

std::vector<double> bound_q_grid(double alpha) {
  std::vector<double> qs;
  for (double q : {1.0, 1.5, 2.0, (2.0 + 0.95 / alpha) / 2.0, 0.95 / alpha}) {
    if (q >= 1.0 && q * alpha < 1.0 && std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
  }
  std::sort(qs.begin(), qs.end());
  return qs;
}

McReport deterministic_bound(Context& ctx) {
  const auto alphas = ctx.args.list("alphas", "0.1,0.25,0.4");
  const std::size_t samples = ctx.args.count("samples", 1000);
  const double slack = ctx.args.num("slack", 1e-9);
  ctx.args.finish();
  McReport r = start("deterministic-bound", ctx, samples);
  std::size_t violations = 0;
  double worst = 0.0;
  for (double a : alphas) {
    const FractionalOrder order(a);
    const auto qs = bound_q_grid(a);
    const auto table = run_replications(ctx.config(samples), [&](Philox& rng, std::size_t) {
      const double xi = rng.uniform();
      std::vector<double> row;
      for (double q : qs) row.push_back(single_path_norm(xi, order, q));
      return row;
    });
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const double bound = deterministic_bound_K(order, qs[k]);
      double mx = 0.0;
      for (const auto& row : table) {
        mx = std::max(mx, row[k]);
        if (row[k] > bound + slack) ++violations;
      }
      r.series["alpha"].push_back(a);
      r.series["q"].push_back(qs[k]);
      r.series["max_norm"].push_back(mx);
      r.series["bound"].push_back(bound);
      worst = std::max(worst, mx / bound);
    }
  }
  r.scalars["violations"] = static_cast<double>(violations);
  r.scalars["max_ratio"] = worst;
  r.flags["pass"] = violations == 0;
  return r;
}

McReport rosenthal_chain(Context& ctx) {
  const auto alphas = ctx.args.list("alphas", "0.1,0.25,0.4");
  const auto ns = ctx.args.list("ns", "1,10,100,1000");
  const std::size_t reps = ctx.args.count("reps", 2000);
  const std::size_t grid = ctx.args.count("grid", 256);
  ctx.args.finish();
  const auto law = ClosedForm::uniform_reliability();
  McReport r = start("rosenthal-chain", ctx, reps);
  std::size_t violations = 0;
  for (double a : alphas) {
    const FractionalOrder order(a);
    const std::vector<double> qs{2.0, (2.0 + 0.95 / a) / 2.0, 0.95 / a};
    for (double nd : ns) {
      const auto n = static_cast<std::size_t>(nd);
      const McReport part = empirical_loss_ladder(order, qs, n, law, ctx.config(reps, n), grid);
      for (std::size_t k = 0; k < qs.size(); ++k) {
        const double w = part.series.at("w_qn")[k];
        const double bound = part.series.at("bound")[k];
        r.series["alpha"].push_back(a);
        r.series["q"].push_back(qs[k]);
        r.series["n"].push_back(nd);
        r.series["w_qn"].push_back(w);
        r.series["w_qn_stderr"].push_back(part.series.at("w_qn_stderr")[k]);
        r.series["bound"].push_back(bound);
        if (w > bound) ++violations;
      }
    }
  }
  r.scalars["violations"] = static_cast<double>(violations);
  r.flags["pass"] = violations == 0;
  return r;
}

McReport loss(Context& ctx) {
  LossSpec spec;
  spec.order = FractionalOrder(ctx.args.num("alpha", 0.25));
  spec.q = ctx.args.num("q", 2.0);
  spec.n = ctx.args.count("n", 100);
  spec.reps = ctx.args.count("reps", 1000);
  const auto law = ClosedForm::parse(ctx.args.str("law", "uniform"));
  const std::string kernel = ctx.args.str("kernel", "exact");
  const std::size_t points = ctx.args.count("points", 512);
  ctx.args.finish();
  if (kernel != "exact" && kernel != "closed") throw InvalidInput("kernel must be exact or closed");
  if (!spec.valid()) throw RegimeError("W_qn is infinite for q >= 1/alpha");
  McReport r = empirical_loss(spec, law, ctx.config(spec.reps, spec.n));
  r.experiment = "loss";
  const CovKernel k(spec.order, kernel == "exact" ? CovKernel::Variant::ExactC : CovKernel::Variant::ClosedR);
  const LimitProcess limit(k, limit_grid(spec.order, points));
  const auto norms = limit.sample_norms(spec.q, ctx.config(spec.reps));
  double acc = 0.0;
  for (double v : norms) acc += std::pow(v, spec.q);
  r.scalars["limit_w_q"] = std::pow(acc / static_cast<double>(norms.size()), 1.0 / spec.q);
  r.strings["kernel"] = kernel;
  return r;
}

McReport limit_tail(Context& ctx) {
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const double q = ctx.args.num("q", 2.0);
  const auto us = ctx.args.list("u", "0.5,1,1.5,2");
  const std::string kernel = ctx.args.str("kernel", "exact");
  const std::size_t reps = ctx.args.count("reps", 20000);
  const std::size_t points = ctx.args.count("points", 512);
  ctx.args.finish();
  if (kernel != "exact" && kernel != "closed") throw InvalidInput("kernel must be exact or closed");
  if (!(q >= 1.0 && q * order.alpha() < 1.0)) throw RegimeError("limit norm needs 1 <= q < 1/alpha");
  const CovKernel k(order, kernel == "exact" ? CovKernel::Variant::ExactC : CovKernel::Variant::ClosedR);
  const LimitProcess limit(k, limit_grid(order, points));
  const auto norms = limit.sample_norms(q, ctx.config(reps));
  McReport r = start("limit", ctx, reps);
  r.scalars["alpha"] = order.alpha();
  r.scalars["q"] = q;
  r.scalars["jitter"] = limit.jitter();
  r.strings["kernel"] = kernel;
  std::vector<double> u2, logq;
  for (double u : us) {
    if (!(u >= 0.0)) throw InvalidInput("u must be nonnegative");
    const double p = static_cast<double>(std::count_if(norms.begin(), norms.end(), [u](double v) { return v > u; })) /
                     static_cast<double>(norms.size());
    r.series["u"].push_back(u);
    r.series["probability"].push_back(p);
    if (p > 0.0 && u > 0.0) {
      u2.push_back(u * u);
      logq.push_back(std::log(p));
    }
  }
  if (u2.size() >= 2) r.scalars["log_q_vs_u2_slope"] = slope_fit(u2, logq).slope;
  r.add_moments("norm", norms);
  return r;
}

McReport regime_dichotomy(Context& ctx) {
  const auto alphas = ctx.args.list("alphas", "0.1,0.25,0.4");
  const auto eps = ctx.args.list("eps", "0.01,0.005,0.0025,0.00125");
  const double excess = ctx.args.num("excess", 0.05);
  const double xi = ctx.args.num("xi", 0.3);
  const std::size_t n0 = ctx.args.count("n0", 1024);
  const std::size_t levels = ctx.args.count("levels", 6);
  ctx.args.finish();
  McReport r = start("regime-dichotomy", ctx, 0);
  bool pass = true;
  for (double a : alphas) {
    const FractionalOrder order(a);
    std::vector<double> le, lw;
    for (double e : eps) {
      const double q = (1.0 - e) / a;
      const double w = w_q1_exact(order, q);
      le.push_back(std::log(e));
      lw.push_back(q * std::log(w));
      r.series["w_alpha"].push_back(a);
      r.series["w_q"].push_back(q);
      r.series["w_q1"].push_back(w);
    }
    const double slope = slope_fit(le, lw).slope;
    const double r_grading = default_grading(order);
    const auto zeta = [&](double x) { return (x > 0.0 ? indicator_frac_derivative(x, xi, order) : 0.0) - g_alpha(x, a); };
    const auto make_nodes = [&](std::size_t intervals) {
      auto v = composite_nodes(1.0, intervals, {xi}, r_grading);
      v.erase(v.begin());
      return v;
    };
    const auto power = [&](double x) { return std::pow(x, -a); };
    const double q_div = 1.0 / a + excess;
    const double q_fin = 0.95 / a;
    const bool div_power = lq_norm_refinement(power, q_div, make_nodes, n0, levels).diverging;
    const bool div_zeta = lq_norm_refinement(zeta, q_div, make_nodes, n0, levels).diverging;
    const bool fin_zeta = !lq_norm_refinement(zeta, q_fin, make_nodes, n0, levels).diverging;
    r.series["alpha"].push_back(a);
    r.series["pole_slope"].push_back(slope);
    r.series["diverging_power"].push_back(div_power ? 1.0 : 0.0);
    r.series["diverging_zeta"].push_back(div_zeta ? 1.0 : 0.0);
    r.series["stable_below"].push_back(fin_zeta ? 1.0 : 0.0);
    pass = pass && std::abs(slope + 1.0) <= 0.1 && div_power && div_zeta && fin_zeta;
  }
  r.series["eps"] = eps;
  r.flags["pass"] = pass;
  return r;
}

McReport kernel_covariance(Context& ctx) {
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const auto pts = ctx.args.list("points", "0.1,0.3,0.5,0.7,0.9");
  const std::size_t n = ctx.args.count("n", 1000);
  const std::size_t reps = ctx.args.count("reps", 10000);
  ctx.args.finish();
  const auto table = run_replications(ctx.config(reps, n), [&](Philox& rng, std::size_t) {
    std::vector<double> sample(n);
    for (double& v : sample) v = rng.uniform();
    return centered_process_path(Sample(std::move(sample)), order, pts).values();
  });
  const std::size_t k = pts.size();
  std::vector<double> mean(k, 0.0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < k; ++i) mean[i] += row[i];
  }
  for (double& m : mean) m /= static_cast<double>(reps);
  const CovKernel exact(order, CovKernel::Variant::ExactC);
  const CovKernel closed(order, CovKernel::Variant::ClosedR);
  McReport r = start("kernel-covariance", ctx, reps);
  bool pass = true;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      std::vector<double> prod(reps);
      for (std::size_t t = 0; t < reps; ++t) prod[t] = (table[t][i] - mean[i]) * (table[t][j] - mean[j]);
      const Moments m = batch_moments(prod);
      const double cov = m.mean() * static_cast<double>(reps) / static_cast<double>(reps - 1);
      const double se = m.stderr_of_mean();
      const double ce = exact(pts[i], pts[j]);
      const double cp = closed(pts[i], pts[j]);
      r.series["x"].push_back(pts[i]);
      r.series["y"].push_back(pts[j]);
      r.series["mc_cov"].push_back(cov);
      r.series["mc_stderr"].push_back(se);
      r.series["exact_c"].push_back(ce);
      r.series["closed_r"].push_back(cp);
      r.series["z_exact"].push_back((cov - ce) / se);
      r.series["z_closed"].push_back((cov - cp) / se);
      pass = pass && std::abs(cov - ce) <= 3.0 * se;
      if (i == j) pass = pass && std::abs(cov - cp) <= 3.0 * se;
    }
  }
  r.scalars["alpha"] = order.alpha();
  r.scalars["n"] = static_cast<double>(n);
  r.scalars["max_abs_z_exact"] = max_abs(r.series["z_exact"]);
  r.flags["pass"] = pass;
  return r;
}

McReport kiefer(Context& ctx) {
  const std::size_t n = ctx.args.count("n", 1000);
  const std::size_t reps = ctx.args.count("reps", 10000);
  const auto us = ctx.args.list("u", "1,1.5,2");
  ctx.args.finish();
  McReport r = kiefer_bound_check(n, us, ctx.config(reps, n));
  r.experiment = "kiefer";
  std::size_t violations = 0;
  bool exact_below = true;
  double max_z = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < us.size(); ++k) {
    const double p = r.series["exceedance"][k];
    const double bound = r.series["bound"][k];
    const double se = r.series["exceedance_stderr"][k];
    if (p > bound) ++violations;
    exact_below = exact_below && r.series["exact_exceedance"][k] <= bound;
    const double z = se > 0.0 ? (p - bound) / se : (p > bound ? std::numeric_limits<double>::infinity() : 0.0);
    r.series["z_vs_bound"].push_back(z);
    max_z = std::max(max_z, z);
  }
  r.scalars["violations"] = static_cast<double>(violations);
  r.scalars["max_z_vs_bound"] = max_z;
  r.flags["exact_below_bound"] = exact_below;
  r.flags["no_significant_violation"] = max_z <= 3.0;
  return r;
}

McReport gls(Context& ctx) {
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const std::size_t n = ctx.args.count("n", 1);
  const std::size_t reps = ctx.args.count("reps", 1000);
  const std::size_t points = ctx.args.count("points", 1024);
  ctx.args.finish();
  auto nodes = graded_nodes(1.0, points, default_grading(order));
  nodes.erase(nodes.begin());
  const auto table = run_replications(ctx.config(reps, n), [&](Philox& rng, std::size_t) {
    std::vector<double> sample(n);
    for (double& v : sample) v = rng.uniform();
    const GlsNorm g = gls_norm(centered_process_path(Sample(std::move(sample)), order, nodes), order);
    return std::vector<double>{g.value, g.argmax_q};
  });
  McReport r = start("gls-norm", ctx, reps);
  const auto values = column(table, 0);
  r.scalars["alpha"] = order.alpha();
  r.scalars["n"] = static_cast<double>(n);
  r.scalars["max_value"] = *std::max_element(values.begin(), values.end());
  r.add_moments("value", values);
  return r;
}

McReport joint_tail_experiment(Context& ctx) {
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const std::size_t draws = ctx.args.count("draws", 1000000);
  const double fit_from = ctx.args.num("fit_from", 10.0);
  ctx.args.finish();
  const TailDiagnostic t = joint_tail(order, draws, ctx.seed, fit_from);
  McReport r = start("joint-tail", ctx, draws);
  r.scalars["alpha"] = order.alpha();
  r.scalars["fitted_slope"] = t.fitted_slope;
  r.scalars["slope_inverse_alpha"] = -1.0 / order.alpha();
  r.scalars["slope_alpha"] = -order.alpha();
  r.scalars["rel_dev_inverse_alpha"] = std::abs(t.fitted_slope * order.alpha() + 1.0);
  r.series["levels"] = t.levels;
  r.series["exceedance"] = t.exceedance;
  r.flags["supports_inverse_alpha"] = t.estimable && std::abs(t.fitted_slope * order.alpha() + 1.0) <= 0.15;
  return r;
}

// ---------------------------------------------------------------- spectral

McReport spectral_bias(Context& ctx) {
  const auto model = SpectralModel::parse(ctx.args.str("model", "ar1:0.5"));
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const auto ns = ctx.args.list("ns", "256,1024,4096");
  const double lambda = ctx.args.num("lambda", kPi);
  ctx.args.finish();
  const double truth = spectral_truth(model, order, lambda);
  McReport r = start("spectral-bias", ctx, 0);
  std::vector<double> ln, lb;
  double white_bias = 0.0;
  for (double nd : ns) {
    const auto n = static_cast<std::size_t>(nd);
    const double bias = expected_estimate(model, order, n, {lambda})[0] - truth;
    const double wb = expected_estimate(SpectralModel::white(), order, n, {lambda})[0] -
                      spectral_truth(SpectralModel::white(), order, lambda);
    white_bias = std::max(white_bias, std::abs(wb));
    r.series["n"].push_back(nd);
    r.series["bias"].push_back(bias);
    ln.push_back(std::log(nd));
    lb.push_back(std::log(std::abs(bias)));
  }
  const double slope = slope_fit(ln, lb).slope;
  r.strings["model"] = model.name();
  r.scalars["alpha"] = order.alpha();
  r.scalars["lambda"] = lambda;
  r.scalars["truth"] = truth;
  r.scalars["bias_slope"] = slope;
  r.scalars["white_noise_max_abs_bias"] = white_bias;
  r.flags["pass"] = std::abs(slope + 1.0) <= 0.4;
  return r;
}

struct SpectralDraws {
  std::vector<std::vector<double>> estimates;  // per rep, per lambda
  std::vector<double> plugin;                   // per rep, at the last lambda
};

SpectralDraws simulate_spectral(const SpectralModel& model, const FractionalOrder& order, std::size_t n,
                                const std::vector<double>& grid, const McConfig& cfg) {
  const SeriesGenerator gen(model, n);
  const auto table = run_replications(cfg, [&](Philox& rng, std::size_t) {
    std::vector<double> x;
    gen.generate(rng, x);
    const GridFunction pg = periodogram(x);
    auto row = spectral_estimate_values(pg, order, grid);
    row.push_back(plugin_I2alpha_f2(pg, order, grid.back()));
    return row;
  });
  SpectralDraws d;
  for (const auto& row : table) {
    d.estimates.emplace_back(row.begin(), row.end() - 1);
    d.plugin.push_back(row.back());
  }
  return d;
}

McReport spectral_variance(Context& ctx) {
  const auto model = SpectralModel::parse(ctx.args.str("model", "white"));
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const std::size_t n = ctx.args.count("n", 4096);
  const std::size_t reps = ctx.args.count("reps", 2000);
  const double lambda = ctx.args.num("lambda", kPi);
  ctx.args.finish();
  const auto d = simulate_spectral(model, order, n, {lambda}, ctx.config(reps, n));
  std::vector<double> est;
  for (const auto& row : d.estimates) est.push_back(row[0]);
  const Moments m = batch_moments(est);
  const double nvar = static_cast<double>(n) * m.variance();
  const double nominal = theta_covariance(model, order, lambda, lambda);
  const double limit = theta_limit_covariance(model, order, lambda, lambda);
  McReport r = start("spectral-variance", ctx, reps);
  r.strings["model"] = model.name();
  r.scalars["alpha"] = order.alpha();
  r.scalars["n"] = static_cast<double>(n);
  r.scalars["lambda"] = lambda;
  r.scalars["mean"] = m.mean();
  r.scalars["truth"] = spectral_truth(model, order, lambda);
  r.scalars["n_var"] = nvar;
  r.scalars["theta_nominal"] = nominal;
  r.scalars["theta_limit"] = limit;
  r.scalars["var_ratio"] = nvar / nominal;
  r.scalars["var_ratio_limit"] = nvar / limit;
  r.scalars["plugin_ratio"] = batch_moments(d.plugin).mean() / i2alpha_f2_truth(model, order, lambda);
  r.flags["pass"] = std::abs(nvar / nominal - 1.0) <= 0.1;
  r.flags["pass_limit"] = std::abs(nvar / limit - 1.0) <= 0.1;
  return r;
}

double band_coverage_of(const SpectralDraws& d, const std::vector<double>& truth, double halfwidth) {
  std::size_t hits = 0;
  for (const auto& row : d.estimates) {
    bool inside = true;
    for (std::size_t j = 0; j < row.size(); ++j) inside = inside && std::abs(row[j] - truth[j]) <= halfwidth;
    if (inside) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(d.estimates.size());
}

McReport band_coverage(Context& ctx) {
  const auto model = SpectralModel::parse(ctx.args.str("model", "white"));
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const std::size_t n = ctx.args.count("n", 1024);
  const std::size_t reps = ctx.args.count("reps", 2000);
  const std::size_t points = ctx.args.count("grid", 32);
  const double level = ctx.args.num("level", 0.95);
  const double lambda_max = ctx.args.num("lambda_max", kPi);
  const std::size_t band_reps = ctx.args.count("band_reps", 20000);
  ctx.args.finish();
  const auto grid = default_lambda_grid(points, lambda_max);
  McConfig band_cfg = ctx.config(band_reps);
  band_cfg.seed = derive_seed(ctx.seed, 1);
  const Band band = uniform_confidence_band(model, order, n, level, grid, ThetaVariant::Limit, band_cfg);
  const Band nominal = uniform_confidence_band(model, order, n, level, grid, ThetaVariant::Nominal, band_cfg);
  const auto d = simulate_spectral(model, order, n, grid, ctx.config(reps, n));
  std::vector<double> truth;
  for (double l : grid) truth.push_back(spectral_truth(model, order, l));
  McReport r = start("band-coverage", ctx, reps);
  const double cov = band_coverage_of(d, truth, band.halfwidth);
  r.strings["model"] = model.name();
  r.strings["theta"] = "limit";
  r.scalars["alpha"] = order.alpha();
  r.scalars["n"] = static_cast<double>(n);
  r.scalars["level"] = level;
  r.scalars["u0"] = band.u0;
  r.scalars["halfwidth"] = band.halfwidth;
  r.scalars["coverage"] = cov;
  r.scalars["coverage_nominal_theta"] = band_coverage_of(d, truth, nominal.halfwidth);
  r.scalars["halfwidth_nominal_theta"] = nominal.halfwidth;
  r.flags["pass"] = std::abs(cov - level) <= 0.03;
  return r;
}

McReport spectral_summary(Context& ctx) {
  const auto model = SpectralModel::parse(ctx.args.str("model", "white"));
  const FractionalOrder order(ctx.args.num("alpha", 0.25));
  const std::size_t n = ctx.args.count("n", 1024);
  const std::size_t reps = ctx.args.count("reps", 500);
  const std::size_t points = ctx.args.count("grid", 32);
  const double level = ctx.args.num("level", 0.95);
  const double lambda_max = ctx.args.num("lambda_max", kPi);
  ctx.args.finish();
  if (!order.estimation_regime()) throw RegimeError("spectral estimator needs alpha < 1/2");
  const auto grid = default_lambda_grid(points, lambda_max);
  McReport r = start("spectral", ctx, reps);
  const GaussianSeries series = generate_series(model, n, ctx.seed);
  const auto est = estimate_spectral_frac_derivative(series.values, order, grid);
  McConfig band_cfg = ctx.config(std::max<std::size_t>(reps, 2000));
  band_cfg.seed = derive_seed(ctx.seed, 1);
  const Band band = uniform_confidence_band(model, order, n, level, grid, ThetaVariant::Limit, band_cfg);
  std::vector<double> ln, lb;
  for (std::size_t m : {n / 16, n / 4, n}) {
    if (m < 2) continue;
    const double bias = expected_estimate(model, order, m, {lambda_max})[0] - spectral_truth(model, order, lambda_max);
    if (bias != 0.0) {
      ln.push_back(std::log(static_cast<double>(m)));
      lb.push_back(std::log(std::abs(bias)));
    }
  }
  McConfig var_cfg = ctx.config(reps, n);
  var_cfg.seed = derive_seed(ctx.seed, 2);
  const auto d = simulate_spectral(model, order, n, {lambda_max}, var_cfg);
  std::vector<double> at;
  for (const auto& row : d.estimates) at.push_back(row[0]);
  const double nvar = static_cast<double>(n) * batch_moments(at).variance();
  r.strings["model"] = model.name();
  r.scalars["alpha"] = order.alpha();
  r.scalars["n"] = static_cast<double>(n);
  r.scalars["level"] = level;
  r.series["lambda"] = grid;
  r.series["estimate_curve"] = est.values;
  std::vector<double> truth;
  for (double l : grid) truth.push_back(spectral_truth(model, order, l));
  r.series["truth_curve"] = truth;
  r.scalars["band"] = band.halfwidth;
  r.scalars["band_u0"] = band.u0;
  if (ln.size() >= 2) {
    r.scalars["bias_slope"] = slope_fit(ln, lb).slope;
  } else {
    r.flags["bias_identically_zero"] = true;
  }
  r.scalars["var_ratio"] = nvar / theta_covariance(model, order, lambda_max, lambda_max);
  r.scalars["var_ratio_limit"] = nvar / theta_limit_covariance(model, order, lambda_max, lambda_max);
  return r;
}

// ---------------------------------------------------------------- mixed

McReport mixed_unbiasedness(Context& ctx) {
  const double alpha = ctx.args.num("alpha", 0.25);
  const auto betas = ctx.args.list("betas", "0.1,0.25");
  const double x = ctx.args.num("x", 0.3);
  const double y = ctx.args.num("y", 0.6);
  const std::size_t n = ctx.args.count("n", 1000);
  const std::size_t reps = ctx.args.count("reps", 10000);
  ctx.args.finish();
  McReport r = start("mixed-unbiasedness", ctx, reps);
  bool pass = true;
  std::uint64_t stream = 0;
  for (double b : betas) {
    const MixedOrder order(alpha, b);
    for (PairLaw law : {PairLaw::IndependentUniform, PairLaw::Comonotone}) {
      McConfig cfg = ctx.config(reps, n);
      cfg.seed = derive_seed(ctx.seed, stream++);
      const auto table = run_replications(cfg, [&](Philox& rng, std::size_t) {
        return std::vector<double>{estimate_mixed(draw_pairs(law, n, rng), x, y, order)};
      });
      const Moments m = batch_moments(column(table, 0));
      const double truth = law == PairLaw::IndependentUniform ? mixed_truth(law, x, y, order)
                                                              : comonotone_nested_oracle(x, y, order);
      const double z = (m.mean() - truth) / m.stderr_of_mean();
      r.series["beta"].push_back(b);
      r.series["comonotone"].push_back(law == PairLaw::Comonotone ? 1.0 : 0.0);
      r.series["mean"].push_back(m.mean());
      r.series["stderr"].push_back(m.stderr_of_mean());
      r.series["truth"].push_back(truth);
      r.series["z"].push_back(z);
      pass = pass && std::abs(z) <= 3.0;
    }
  }
  r.scalars["alpha"] = alpha;
  r.scalars["x"] = x;
  r.scalars["y"] = y;
  r.scalars["n"] = static_cast<double>(n);
  r.flags["pass"] = pass;
  return r;
}

McReport field_moment(Context& ctx) {
  const double alpha = ctx.args.num("alpha", 0.25);
  const auto betas = ctx.args.list("betas", "0.25,0.1");
  const auto eps = ctx.args.list("eps", "0.01,0.005,0.0025,0.00125");
  const PairLaw law = parse_pair_law(ctx.args.str("law", "independent"));
  const std::size_t reps = ctx.args.count("reps", 10000);
  ctx.args.finish();
  McReport r = start("field-moment", ctx, reps);
  bool pass = true;
  for (double b : betas) {
    const MixedOrder order(alpha, b);
    const PoleLadder ladder = pole_order_ladder(order, law, eps, ctx.config(reps));
    const double expected = alpha == b ? 2.0 : 1.0;
    r.series["beta"].push_back(b);
    r.series["pole_order"].push_back(-ladder.slope);
    r.series["expected_order"].push_back(expected);
    for (std::size_t k = 0; k < eps.size(); ++k) {
      r.series["ladder_beta"].push_back(b);
      r.series["ladder_q"].push_back(ladder.qs[k]);
      r.series["ladder_moment"].push_back(ladder.moments[k]);
      r.series["ladder_stderr"].push_back(ladder.stderrs[k]);
      if (law == PairLaw::IndependentUniform) {
        r.series["ladder_closed_form"].push_back(uniform_summand_power_mean(alpha, ladder.qs[k]) *
                                                 uniform_summand_power_mean(b, ladder.qs[k]));
      }
    }
    pass = pass && std::abs(-ladder.slope - expected) <= 0.4;
  }
  r.series["eps"] = eps;
  r.strings["law"] = pair_law_name(law);
  r.scalars["alpha"] = alpha;
  r.flags["pass"] = pass;
  return r;
}

using Runner = std::function<McReport(Context&)>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r = {
      {"abel-inversion", abel_inversion},
      {"unbiasedness", [](Context& c) { return point_mc("unbiasedness", c); }},
      {"variance-law", [](Context& c) { return point_mc("variance-law", c); }},
      {"clt", [](Context& c) { return point_mc("clt", c); }},
      {"coverage", coverage},
      {"tail-slope", tail_slope},
      {"deterministic-bound", deterministic_bound},
      {"rosenthal-chain", rosenthal_chain},
      {"loss", loss},
      {"limit", limit_tail},
      {"regime-dichotomy", regime_dichotomy},
      {"kernel-covariance", kernel_covariance},
      {"kiefer", kiefer},
      {"gls-norm", gls},
      {"joint-tail", joint_tail_experiment},
      {"spectral-bias", spectral_bias},
      {"spectral-variance", spectral_variance},
      {"band-coverage", band_coverage},
      {"spectral", spectral_summary},
      {"mixed-unbiasedness", mixed_unbiasedness},
      {"field-moment", field_moment},
  };
  return r;
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

McReport run_experiment(const std::string& name, const Params& params, std::uint64_t seed, unsigned workers) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw InvalidInput("unknown experiment '" + name + "'");
  if (workers == 0) throw InvalidInput("workers must be positive");
  Context ctx{Args(params), seed, workers};
  return it->second(ctx);
}

}  // namespace fracest
