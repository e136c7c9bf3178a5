#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fracest/error.hpp"
#include "fracest/estimator.hpp"
#include "fracest/fraccalc.hpp"
#include "fracest/laws.hpp"
#include "fracest/lq.hpp"
#include "fracest/mc.hpp"
#include "fracest/rng.hpp"
#include "fracest/special.hpp"

using namespace fracest;

namespace {

// Reference values below come from 30-digit mpmath / scipy evaluations.
constexpr double kGamma075 = 1.2254167024651776;
constexpr double kSqrtPi = 1.7724538509055160;

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

}  // namespace

TEST_SUITE("special") {
  TEST_CASE("gamma matches reference values") {
    CHECK(rel_close(gamma_fn(0.75), kGamma075, 1e-13));
    CHECK(rel_close(gamma_fn(0.5), kSqrtPi, 1e-13));
    CHECK(rel_close(gamma_fn(5.0), 24.0, 1e-13));
    CHECK(rel_close(gamma_fn(1.75), 1.0 / 1.0880652521310173, 1e-13));
    CHECK(rel_close(gamma_fn(-0.5), -2.0 * kSqrtPi, 1e-13));
  }

  TEST_CASE("beta and normal helpers") {
    CHECK(rel_close(beta_fn(0.5, 0.5), std::numbers::pi, 1e-13));
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(normal_quantile(0.975) - 1.959963984540054) <= 1e-8);
    CHECK(std::abs(normal_quantile(0.5)) <= 1e-12);
    for (double p : {1e-6, 0.01, 0.3, 0.77, 0.999}) {
      CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) <= 1e-10);
    }
  }

  TEST_CASE("Kolmogorov survival and the exact finite-n distribution") {
    CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-10));
    CHECK(ks_exact_cdf(10, 0.274) == doctest::Approx(0.6284796154565043).epsilon(1e-9));
    CHECK(ks_exact_cdf(100, 0.1) == doctest::Approx(0.7473072429936126).epsilon(1e-9));
    const double u = 1.5;
    CHECK(1.0 - ks_exact_cdf(1000, u / std::sqrt(1000.0)) == doctest::Approx(0.021499063633379435).epsilon(1e-6));
    // DKW with Massart's constant holds for every n.
    for (double v : {1.0, 1.5, 2.0}) {
      CHECK(1.0 - ks_exact_cdf(1000, v / std::sqrt(1000.0)) <= 2.0 * std::exp(-2.0 * v * v));
    }
  }
}

TEST_SUITE("fraccalc") {
  TEST_CASE("integral of a constant") {
    const auto f = tabulate(uniform_nodes(1.0, 64), [](double) { return 1.0; });
    const auto I = frac_integral(f, FractionalOrder(0.5));
    CHECK(I.values().back() == doctest::Approx(1.1283791670955126).epsilon(1e-12));
    for (std::size_t k = 1; k < I.size(); ++k) {
      const double x = I.nodes()[k];
      CHECK(rel_close(I.values()[k], std::sqrt(x) / gamma_fn(1.5), 1e-12));
    }
  }

  TEST_CASE("derivative of F(x) = x and of F = 1") {
    const FractionalOrder q(0.25);
    const auto id = frac_derivative(tabulate(uniform_nodes(1.0, 10), [](double x) { return x; }), q);
    CHECK(id.values().back() == doctest::Approx(1.0880652521310173).epsilon(1e-12));
    const auto one = frac_derivative(tabulate(uniform_nodes(1.0, 10), [](double) { return 1.0; }), q);
    CHECK(rel_close(one(0.5), std::pow(0.5, -0.25) / kGamma075, 1e-12));
  }

  TEST_CASE("Abel round trip") {
    const FractionalOrder q(0.3);
    const auto nodes = graded_nodes(1.0, 2048, default_grading(q));
    const auto F = tabulate(nodes, [](double x) { return x * x + 0.5 * x; });
    const auto back = frac_integral(frac_derivative(F, q), q);
    double err = 0.0;
    for (std::size_t k = 0; k < back.size(); ++k) err = std::max(err, std::abs(back.values()[k] - F.values()[k]));
    CHECK(err < 1e-4);
  }

  TEST_CASE("indicator derivative closed form") {
    const FractionalOrder q(0.25);
    CHECK(indicator_frac_derivative(0.25, 0.5, q) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(indicator_frac_derivative(1.0, 0.5, q) == doctest::Approx(-0.18920711500272103).epsilon(1e-14));
  }

  TEST_CASE("uniform reliability derivative") {
    const FractionalOrder q(0.25);
    const auto law = ClosedForm::uniform_reliability();
    // -(1/3) / Gamma(3/4)
    CHECK(law.reliability_frac_derivative(1.0, q) == doctest::Approx(-0.27201631303275433).epsilon(1e-13));
    CHECK(law.reliability_frac_derivative(0.5, q) == doctest::Approx(0.32348373485535885).epsilon(1e-13));
    const auto nodes = graded_nodes(1.0, 1024, default_grading(q));
    const auto D = frac_derivative(tabulate(nodes, [&](double x) { return law.reliability(x); }), q,
                                   Monotonicity::Any);
    CHECK(D(0.5) == doctest::Approx(law.reliability_frac_derivative(0.5, q)).epsilon(1e-6));
  }

  TEST_CASE("order validation") {
    CHECK_THROWS_AS(FractionalOrder(0.0), InvalidInput);
    CHECK_THROWS_AS(FractionalOrder(1.0), InvalidInput);
    CHECK_THROWS_AS(FractionalOrder(std::nan("")), InvalidInput);
    CHECK(FractionalOrder(0.49).estimation_regime());
    CHECK_FALSE(FractionalOrder(0.5).estimation_regime());
  }

  TEST_CASE("grid csv round trip is exact") {
    const auto f = tabulate(graded_nodes(2.0, 37, 2.5), [](double x) { return std::sin(3.0 * x) / 7.0; },
                            Grading::parse("graded:2.5"));
    double alpha = 0.0;
    const auto g = grid_from_csv(to_csv(f, 0.3), &alpha);
    CHECK(alpha == 0.3);
    CHECK(g.nodes() == f.nodes());
    CHECK(g.values() == f.values());
    CHECK(g.grading().label() == f.grading().label());
  }
}

TEST_SUITE("estimator") {
  TEST_CASE("estimate is invariant under permutation") {
    std::vector<double> xs;
    {
      std::mt19937_64 gen(5);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < 50; ++i) xs.push_back(u(gen));
    }
    const FractionalOrder q(0.25);
    const Sample s(xs);
    auto shuffled = xs;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 17, shuffled.end());
    CHECK(std::abs(estimate_point(Sample(shuffled), 0.5, q) - estimate_point(s, 0.5, q)) <= 1e-14);
  }

  TEST_CASE("single observation and the data-point convention") {
    const FractionalOrder q(0.25);
    CHECK(estimate_point(Sample({0.3}), 0.5, q) == indicator_frac_derivative(0.5, 0.3, q) / gamma_fn(0.75));
    // xi == x contributes x^-alpha only.
    CHECK(estimate_point(Sample({0.5}), 0.5, q) == doctest::Approx(std::pow(0.5, -0.25) / kGamma075));
  }

  TEST_CASE("exact variance for the uniform law") {
    const FractionalOrder q(0.25);
    const auto law = ClosedForm::uniform_reliability();
    CHECK(sigma2_alpha_exact(law, 1.0, q) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    CHECK(sigma2_alpha_exact(law, 1e-9, q) < 1e-4);
  }

  TEST_CASE("plug-in variance clamps and flags") {
    const auto s2 = sigma2_alpha(Sample(std::vector<double>(10, 0.8)), 0.5, FractionalOrder(0.25));
    CHECK(s2.value >= 0.0);
    CHECK(std::abs(s2.value) <= 1e-12);
  }

  TEST_CASE("regime and input validation") {
    CHECK_THROWS_AS(estimate_point(Sample({0.2}), 0.5, FractionalOrder(0.6)), RegimeError);
    CHECK_THROWS_AS(Sample({0.2, -0.1}), InvalidInput);
    CHECK_THROWS_AS(Sample(std::vector<double>{}), InvalidInput);
  }

  TEST_CASE("confidence interval is symmetric at the requested level") {
    const Sample s({0.1, 0.2, 0.35, 0.6, 0.9, 0.42, 0.05});
    const auto pe = confidence_interval(s, 0.5, FractionalOrder(0.25), 0.9);
    CHECK(pe.ci_high - pe.value == doctest::Approx(pe.value - pe.ci_low));
    CHECK(pe.ci_high - pe.value == doctest::Approx(normal_quantile(0.95) * pe.stderr));
  }
}

TEST_SUITE("lq") {
  TEST_CASE("constants") {
    const FractionalOrder q(0.25);
    CHECK(deterministic_bound_K(q, 2.0) == doctest::Approx(2.2431039810502478).epsilon(1e-14));
    CHECK(rosenthal_constant(q) == doctest::Approx(1.885602418441875).epsilon(1e-14));
    CHECK(rosenthal_constant(FractionalOrder(0.1)) == doctest::Approx(2.838114439237751).epsilon(1e-14));
    CHECK(g_alpha(1.0, 0.25) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  }

  TEST_CASE("exact W_{2,1} for the uniform law") {
    // sqrt(int_0^1 sigma^2(x) dx) / Gamma(3/4)
    CHECK(w_q1_exact(FractionalOrder(0.25), 2.0) == doctest::Approx(0.6437080840825498).epsilon(1e-8));
  }

  TEST_CASE("L_q norm of x^-alpha") {
    const FractionalOrder q(0.25);
    const auto f = [](double x) { return x > 0.0 ? std::pow(x, -0.25) : 0.0; };
    const auto r = lq_norm_refinement(
        f, 2.0, [&](std::size_t n) { return graded_nodes(1.0, n, 8.0); }, 256, 5);
    CHECK_FALSE(r.diverging);
    CHECK(r.norms.back() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    const auto d = lq_norm_refinement(
        f, 4.05, [&](std::size_t n) { return graded_nodes(1.0, n, 8.0); }, 256, 5);
    CHECK(d.diverging);
    (void)q;
  }

  TEST_CASE("exact covariance kernel") {
    const FractionalOrder q(0.25);
    const CovKernel exact(q, CovKernel::Variant::ExactC);
    const CovKernel closed(q, CovKernel::Variant::ClosedR);
    CHECK(exact(1.0, 1.0) == doctest::Approx(0.14798574911186678).epsilon(1e-10));
    CHECK(exact(0.3, 0.7) == doctest::Approx(0.05674777010296959).epsilon(1e-9));
    CHECK(exact(0.7, 0.3) == doctest::Approx(exact(0.3, 0.7)).epsilon(1e-14));
    for (double x : {0.1, 0.5, 0.9}) CHECK(exact(x, x) == doctest::Approx(closed(x, x)).epsilon(1e-10));
    CHECK(exact.exact_raw_product_integration(0.3, 0.7) == doctest::Approx(exact.raw(0.3, 0.7)).epsilon(1e-4));
  }

  TEST_CASE("single path norm never exceeds the deterministic bound") {
    const FractionalOrder q(0.25);
    for (double xi : {1e-9, 0.01, 0.3, 0.5, 0.99, 1.0}) {
      for (double p : {1.0, 2.0, 3.9}) CHECK(single_path_norm(xi, q, p) <= deterministic_bound_K(q, p) + 1e-9);
    }
  }
}

TEST_SUITE("mc") {
  TEST_CASE("Philox4x32-10 known answers") {
    const auto zero = Philox::block({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto ones = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones == Philox::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  }

  TEST_CASE("uniform draws stay inside the open interval") {
    Philox rng(3, 0);
    for (int i = 0; i < 100000; ++i) {
      const double u = rng.uniform();
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
    }
  }

  TEST_CASE("moment merge equals the batch result") {
    std::vector<double> v;
    Philox rng(9, 1);
    for (int i = 0; i < 1001; ++i) v.push_back(rng.normal() * 3.0 + 1.0);
    Moments a, b;
    for (std::size_t i = 0; i < v.size(); ++i) (i < 400 ? a : b).push(v[i]);
    a.merge(b);
    const auto all = batch_moments(v);
    CHECK(a.count() == all.count());
    CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-14));
    CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  }

  TEST_CASE("replication output does not depend on the worker count") {
    const ReplicationFn fn = [](Philox& rng, std::size_t) {
      double s = 0.0;
      for (int i = 0; i < 50; ++i) s += rng.uniform();
      return std::vector<double>{s, rng.normal()};
    };
    McConfig one{200, 17, 1, 0};
    McConfig three{200, 17, 3, 0};
    CHECK(run_replications(one, fn) == run_replications(three, fn));
  }

  TEST_CASE("KS test against N(0,1)") {
    Philox rng(4, 0);
    std::vector<double> z(1000), shifted(1000);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = rng.normal();
      shifted[i] = z[i] + 1.0;
    }
    CHECK(ks_test_normal(z).p_value > 0.01);
    CHECK(ks_test_normal(shifted).p_value < 0.01);
  }

  TEST_CASE("slope fit recovers an exact line") {
    const auto fit = slope_fit({1, 2, 3, 4}, {1.5, -0.5, -2.5, -4.5});
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(fit.intercept == doctest::Approx(3.5).epsilon(1e-14));
  }
}
