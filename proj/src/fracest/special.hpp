#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fracest {

/// Gamma function via the Lanczos approximation (g = 7, nine terms),
/// with reflection below 1/2. Relative error stays under 1e-13 on the
/// positive axis away from the poles.
double gamma_fn(double x);

/// Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).
double beta_fn(double a, double b);

double normal_cdf(double z);

/// Standard normal quantile. Acklam's rational approximation followed by
/// one Halley step; absolute error well below 1e-8 on (0, 1).
double normal_quantile(double p);

/// Survival function of the Kolmogorov distribution,
/// P(K > t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_survival(double t);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
QuadratureRule gauss_legendre_unit(std::size_t n);

/// int_0^h f(v) dv with 20-point Gauss-Legendre on pieces
/// [h 8^-(j+1), h 8^-j], j = 0..11, plus [0, h 8^-12]. Meant for integrands
/// smooth on (0, h] with a weak power-type singularity in a derivative at 0.
double graded_gauss_legendre(const std::function<double(double)>& f, double h);

/// -(expm1(gamma * log1p(-rho))) = 1 - (1 - rho)^gamma, accurate for small rho.
double one_minus_pow_complement(double rho, double gamma);

}  // namespace fracest
