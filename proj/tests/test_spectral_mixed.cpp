#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracest/error.hpp"
#include "fracest/mc.hpp"
#include "fracest/multivariate.hpp"
#include "fracest/rng.hpp"
#include "fracest/special.hpp"
#include "fracest/spectral.hpp"

using namespace fracest;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("spectral") {
  TEST_CASE("model densities and covariances") {
    const auto w = SpectralModel::white();
    CHECK(w.density(1.3) == doctest::Approx(1.0 / (2.0 * kPi)));
    CHECK(w.covariance(0) == 1.0);
    CHECK(w.covariance(3) == 0.0);
    const auto ar = SpectralModel::ar1(0.5);
    CHECK(ar.covariance(3) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(ar.covariance(-2) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(SpectralModel::parse("ar1:0.5").rho() == 0.5);
    CHECK_THROWS_AS(SpectralModel::ar1(1.0), InvalidInput);
  }

  TEST_CASE("periodogram satisfies Parseval") {
    const auto s = generate_series(SpectralModel::ar1(0.3), 257, 11);
    const auto pg = periodogram(s.values);
    double lhs = 0.0, rhs = 0.0;
    for (double v : pg.values()) lhs += v;
    lhs *= 2.0 * kPi / static_cast<double>(s.values.size());
    for (double v : s.values) rhs += v * v;
    rhs /= static_cast<double>(s.values.size());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }

  TEST_CASE("generated series reproduce the AR(1) lag-one covariance") {
    const auto model = SpectralModel::ar1(0.5);
    const SeriesGenerator gen(model, 64);
    Moments lag0, lag1;
    std::vector<double> x;
    for (std::uint64_t r = 0; r < 4000; ++r) {
      Philox rng(21, r);
      gen.generate(rng, x);
      lag0.push(x[10] * x[10]);
      lag1.push(x[30] * x[31]);
    }
    CHECK(std::abs(lag0.mean() - 1.0) <= 3.0 * lag0.stderr_of_mean());
    CHECK(std::abs(lag1.mean() - 0.5) <= 3.0 * lag1.stderr_of_mean());
  }

  TEST_CASE("white-noise truth and exact expectation") {
    const FractionalOrder q(0.25);
    const auto w = SpectralModel::white();
    CHECK(spectral_truth(w, q, kPi) == doctest::Approx(0.40863680246014765).epsilon(1e-12));
    const auto e = expected_estimate(w, q, 512, {kPi / 3.0, kPi});
    CHECK(e[0] == doctest::Approx(spectral_truth(w, q, kPi / 3.0)).epsilon(1e-10));
    CHECK(e[1] == doctest::Approx(spectral_truth(w, q, kPi)).epsilon(1e-10));
  }

  TEST_CASE("expected periodogram of white noise is flat") {
    for (double v : expected_periodogram(SpectralModel::white(), 33)) {
      CHECK(v == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));
    }
  }

  TEST_CASE("covariance kernel of the spectral estimator") {
    const FractionalOrder q(0.25);
    const auto w = SpectralModel::white();
    CHECK(theta_covariance(w, q, kPi, kPi) == doctest::Approx(0.7514281634618418).epsilon(1e-10));
    CHECK(theta_limit_covariance(w, q, kPi, kPi) == doctest::Approx(0.3757140817309209).epsilon(1e-8));
    CHECK(theta_limit_covariance(w, q, 1.0, 2.0) == doctest::Approx(theta_limit_covariance(w, q, 2.0, 1.0)));
    CHECK(i2alpha_f2_truth(w, q, kPi) ==
          doctest::Approx(std::sqrt(kPi) / (4.0 * kPi * kPi * gamma_fn(1.5))).epsilon(1e-12));
  }
}

TEST_SUITE("multivariate") {
  TEST_CASE("summand branches") {
    const MixedOrder ab(0.25, 0.25);
    CHECK(mixed_summand(0.5, 0.5, 0.25, 0.25, ab) == doctest::Approx(2.0).epsilon(1e-14));
    const MixedOrder ab2(0.25, 0.1);
    const double got = mixed_summand(0.3, 0.8, 0.5, 0.6, ab2);
    const double want = (std::pow(0.5, -0.25) - std::pow(0.2, -0.25)) * std::pow(0.6, -0.1);
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
  }

  TEST_CASE("beta > alpha is the swapped problem exactly") {
    Philox rng(2, 0);
    const auto s = draw_pairs(PairLaw::IndependentUniform, 300, rng);
    const MixedOrder order(0.1, 0.3);
    CHECK(order.regime() == MixedOrder::Regime::BetaGtAlpha);
    CHECK(estimate_mixed(s, 0.4, 0.7, order) == estimate_mixed(s.swapped(), 0.7, 0.4, order.swapped()));
  }

  TEST_CASE("independent truth factorizes") {
    const MixedOrder order(0.25, 0.1);
    CHECK(mixed_truth(PairLaw::IndependentUniform, 0.3, 0.6, order) ==
          doctest::Approx(0.21718204933129598).epsilon(1e-12));
  }

  TEST_CASE("comonotone truth agrees with nested operators") {
    const MixedOrder order(0.25, 0.1);
    const double t1 = mixed_truth(PairLaw::Comonotone, 0.3, 0.6, order);
    CHECK(t1 == doctest::Approx(comonotone_nested_oracle(0.3, 0.6, order)).epsilon(1e-5));
    const double t2 = mixed_truth(PairLaw::Comonotone, 0.6, 0.3, order);
    CHECK(t2 == doctest::Approx(comonotone_nested_oracle(0.6, 0.3, order)).epsilon(1e-5));
    const MixedOrder equal(0.25, 0.25);
    CHECK(mixed_truth(PairLaw::Comonotone, 0.3, 0.6, equal) ==
          doctest::Approx(comonotone_nested_oracle(0.3, 0.6, equal, 512)).epsilon(1e-5));
  }

  TEST_CASE("summand power integrals") {
    // (1 - a q)^-1 - (2 - a q)^-1 + B(1/a - q, q + 1) / (a (2 - a q)) at a = 1/4, q = 3
    CHECK(uniform_summand_power_mean(0.25, 3.0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(summand_power_integral(0.4, 0.25, 3.0) == doctest::Approx(3.9933680406145416).epsilon(1e-8));
    CHECK(uniform_summand_power_mean(0.25, 3.96) == doctest::Approx(190.23728163426712).epsilon(1e-10));
  }

  TEST_CASE("constant field norm") {
    Field2D f{{0.25, 0.5, 1.0}, {0.5, 1.0}, std::vector<double>(6, 2.0)};
    CHECK(lq_norm_2d(f, 3.0) == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("pair validation") {
    CHECK_THROWS_AS(Sample2D({{0.1, 0.2}, {0.3, -0.4}}), InvalidInput);
    CHECK_THROWS_AS(parse_pair_law("gumbel"), InvalidInput);
  }
}
