#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fracest/fraccalc.hpp"
#include "fracest/mc.hpp"

namespace fracest {

class Sample2D {
 public:
  explicit Sample2D(std::vector<std::pair<double, double>> pairs);

  const std::vector<std::pair<double, double>>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  Sample2D swapped() const;

 private:
  std::vector<std::pair<double, double>> pairs_;
};

class MixedOrder {
 public:
  enum class Regime { BetaLtAlpha, BetaEqAlpha, BetaGtAlpha };

  MixedOrder(double alpha, double beta) : alpha_(alpha), beta_(beta) {}

  const FractionalOrder& alpha() const { return alpha_; }
  const FractionalOrder& beta() const { return beta_; }
  bool estimation_regime() const { return alpha_.estimation_regime() && beta_.estimation_regime(); }
  Regime regime() const;
  MixedOrder swapped() const { return {beta_.alpha(), alpha_.alpha()}; }

 private:
  FractionalOrder alpha_;
  FractionalOrder beta_;
};

std::string regime_name(MixedOrder::Regime r);

/// f_{a,xi}(x) f_{b,eta}(y), no Gamma factors.
double mixed_summand(double xi, double eta, double x, double y, const MixedOrder& order);

/// Mean of mixed summands over Gamma(1 - a) Gamma(1 - b).
double estimate_mixed(const Sample2D& s, double x, double y, const MixedOrder& order);

/// Bivariate reliability G(x, y) = P(xi >= x, eta >= y) with uniform margins.
enum class PairLaw { IndependentUniform, Comonotone };

PairLaw parse_pair_law(const std::string& name);
std::string pair_law_name(PairLaw law);
Sample2D draw_pairs(PairLaw law, std::size_t n, Philox& rng);

/// D^a_x D^b_y G(x, y) on (0, 1]^2. For the comonotone law this is
/// int_0^1 f_{a,t}(x) f_{b,t}(y) dt / (Gamma Gamma) by quadrature.
double mixed_truth(PairLaw law, double x, double y, const MixedOrder& order);

/// Comonotone truth from nested numerical operators: D^b in y on a graded
/// grid for each x node, then D^a in x. x != y required.
double comonotone_nested_oracle(double x, double y, const MixedOrder& order, std::size_t points = 256);

struct Field2D {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values;  // row-major, xs index first

  double at(std::size_t i, std::size_t j) const { return values[i * ys.size() + j]; }
};

/// S_n(x, y) = n^-1/2 sum (f f - Gamma Gamma G^(a,b)(x, y)).
Field2D mixed_loss_field(const Sample2D& s, const MixedOrder& order, PairLaw law, const std::vector<double>& xs,
                         const std::vector<double>& ys);

/// (int int |f|^q dx dy / (b_x b_y))^(1/q), tensor trapezoid, constant
/// extension down to 0 along each axis.
double lq_norm_2d(const Field2D& field, double q);

/// int_0^1 |f_{a,xi}(x)|^q dx.
double summand_power_integral(double xi, double alpha, double q);
/// E int_0^1 |f_{a,xi}|^q dx for uniform xi, closed form.
double uniform_summand_power_mean(double alpha, double q);

struct PoleLadder {
  std::vector<double> eps;
  std::vector<double> qs;
  std::vector<double> moments;
  std::vector<double> stderrs;
  double slope = 0.0;
};

/// MC of E int int |f_{a,xi}(x) f_{b,eta}(y)|^q dx dy at q = (1 - eps) / max(a, b),
/// with a log-log fit against eps. Draws are shared across the ladder.
PoleLadder pole_order_ladder(const MixedOrder& order, PairLaw law, const std::vector<double>& eps,
                             const McConfig& cfg);

}  // namespace fracest
