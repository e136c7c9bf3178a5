#include "fracest/selftest.hpp"

#include <cmath>
#include <functional>
#include <variant>

#include "fracest/estimator.hpp"
#include "fracest/io.hpp"
#include "fracest/lq.hpp"
#include "fracest/multivariate.hpp"
#include "fracest/special.hpp"

namespace fracest {

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::string show(double got, double want) { return "got " + format_double(got) + ", want " + format_double(want); }

}  // namespace

std::vector<SelftestCase> run_selftest() {
  std::vector<SelftestCase> out;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    SelftestCase c{name, false, ""};
    try {
      auto [ok, detail] = body();
      c.passed = ok;
      c.detail = detail;
    } catch (const std::exception& e) {
      c.detail = std::string("threw: ") + e.what();
    }
    out.push_back(std::move(c));
  };
  const FractionalOrder quarter(0.25);

  check("integral_of_one", [] {
    const auto f = tabulate(uniform_nodes(1.0, 100), [](double) { return 1.0; });
    const double got = frac_integral(f, FractionalOrder(0.5)).values().back();
    const double want = 1.0 / gamma_fn(1.5);
    return std::make_pair(close(got, want, 1e-12), show(got, want));
  });
  check("derivative_of_identity", [&] {
    const auto f = tabulate(uniform_nodes(1.0, 10), [](double x) { return x; });
    const double got = frac_derivative(f, quarter).values().back();
    const double want = 1.0 / gamma_fn(1.75);
    return std::make_pair(close(got, want, 1e-12), show(got, want));
  });
  check("single_observation_estimate", [&] {
    const double got = estimate_point(Sample({0.3}), 0.5, quarter);
    const double want = indicator_frac_derivative(0.5, 0.3, quarter) / gamma_fn(0.75);
    return std::make_pair(got == want, show(got, want));
  });
  check("alpha_to_zero_is_empirical_reliability", [] {
    const Sample s({0.1, 0.4, 0.7, 0.9});
    const double got = estimate_point(s, 0.5, FractionalOrder(1e-12));
    return std::make_pair(close(got, 0.5, 1e-9), show(got, 0.5));
  });
  check("mixed_summand_square", [] {
    const double got = mixed_summand(0.5, 0.5, 0.25, 0.25, MixedOrder(0.25, 0.25));
    return std::make_pair(close(got, 2.0, 1e-14), show(got, 2.0));
  });
  check("bound_constant", [&] {
    const double got = deterministic_bound_K(quarter, 2.0);
    const double want = std::sqrt(2.0) / gamma_fn(0.75) * std::sqrt(16.0 / 9.0 + 2.0);
    return std::make_pair(close(got, want, 1e-14), show(got, want));
  });
  check("rosenthal_constant", [&] {
    const double got = rosenthal_constant(quarter);
    const double want = kRosenthal * 2.0 / std::log(2.0);
    return std::make_pair(close(got, want, 1e-14), show(got, want));
  });
  check("mean_summand_at_one", [] {
    const double got = g_alpha(1.0, 0.25);
    return std::make_pair(close(got, -1.0 / 3.0, 1e-15), show(got, -1.0 / 3.0));
  });
  check("constant_lq_norm", [] {
    const auto f = tabulate(uniform_nodes(1.0, 16), [](double) { return -3.0; });
    const double got = lq_norm(f, 2.5);
    return std::make_pair(close(got, 3.0, 1e-14), show(got, 3.0));
  });
  check("constant_lq_norm_2d", [] {
    Field2D f{{0.25, 0.5, 1.0}, {0.5, 1.0}, std::vector<double>(6, 2.0)};
    const double got = lq_norm_2d(f, 3.0);
    return std::make_pair(close(got, 2.0, 1e-14), show(got, 2.0));
  });
  check("normal_quantile", [] {
    const double got = normal_quantile(0.975);
    return std::make_pair(std::abs(got - 1.959963984540054) <= 1e-8, show(got, 1.959963984540054));
  });
  check("degenerate_sample_variance", [&] {
    const auto s2 = sigma2_alpha(Sample(std::vector<double>(10, 0.8)), 0.5, quarter);
    return std::make_pair(std::abs(s2.value) <= 1e-12, show(s2.value, 0.0));
  });
  check("constant_ks_rejects", [] {
    const KsResult ks = ks_test_normal(std::vector<double>(200, 0.0));
    return std::make_pair(ks.p_value < 1e-6, show(ks.p_value, 0.0));
  });
  check("single_replication_report", [] {
    McReport r;
    r.add_moments("v", {1.5});
    const bool ok = r.scalars.at("v_mean") == 1.5 && r.flags.count("v_stderr_undefined") && r.flags.at("v_stderr_undefined");
    return std::make_pair(ok, std::string(ok ? "" : "missing stderr_undefined flag"));
  });
  check("ingest_single_column", [] {
    const auto v = parse_sample_text("0.1\n0.2\n");
    const bool ok = std::holds_alternative<Sample>(v) && std::get<Sample>(v).size() == 2;
    return std::make_pair(ok, std::string(ok ? "" : "expected 2 values"));
  });
  check("ingest_pairs", [] {
    const auto v = parse_sample_text("0.1,0.2\n0.3,0.4\n");
    const bool ok = std::holds_alternative<Sample2D>(v) && std::get<Sample2D>(v).size() == 2;
    return std::make_pair(ok, std::string(ok ? "" : "expected 2 pairs"));
  });
  check("kiefer_bound_value", [] {
    const double got = 2.0 * std::exp(-2.0);
    return std::make_pair(close(got, 0.270670566473225, 1e-12), show(got, 0.270670566473225));
  });
  check("zero_gls_norm", [&] {
    const auto f = tabulate(uniform_nodes(1.0, 8), [](double) { return 0.0; });
    const double got = gls_norm(f, quarter).value;
    return std::make_pair(got == 0.0, show(got, 0.0));
  });
  return out;
}

McReport selftest_report() {
  McReport r;
  r.experiment = "selftest";
  std::size_t failed = 0;
  for (const auto& c : run_selftest()) {
    r.flags[c.name] = c.passed;
    if (!c.passed) {
      ++failed;
      r.strings[c.name + "_detail"] = c.detail;
    }
  }
  r.scalars["failed"] = static_cast<double>(failed);
  r.scalars["passed"] = static_cast<double>(r.flags.size() - failed);
  return r;
}

}  // namespace fracest
