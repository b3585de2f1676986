#include "doctest.h"

#include <cmath>

#include "calib/errors.hpp"
#include "calib/inference.hpp"
#include "calib/numerics/matrix.hpp"

using namespace calib;

namespace {

doctest::Approx near(double v) {
  return doctest::Approx(v).epsilon(1e-12);
}

// Tiny frame with clean numbers: n=3, k=2, x_bar=2, sum of x^2 = 14.
SufficientStats tiny_stats() {
  SufficientStats st;
  st.n = 3;
  st.k = 2;
  st.x_bar = 2.0;
  st.s_xx = 2.0 / 3.0;
  st.sum_x_sq = 14.0;
  return st;
}

ControlledParams tiny_params() {
  ControlledParams p;
  p.alpha = 0.0;
  p.beta = 2.0;
  p.x0 = 0.5;
  p.sigma_delta_sq = 0.01;
  p.sigma_eps_sq = 0.04;
  return p;
}

}  // namespace

TEST_CASE("variance formula names are stable") {
  CHECK(to_string(VarianceFormula::V1_Usual) == "v1_usual");
  CHECK(to_string(VarianceFormula::V2_Usual) == "v2_usual");
  CHECK(to_string(VarianceFormula::V1_Controlled) == "v1_controlled");
  CHECK(to_string(VarianceFormula::V2_Controlled) == "v2_controlled");
  CHECK(to_string(VarianceFormula::V_KnownDelta) == "v_known_delta");
}

TEST_CASE("controlled information matrix matches hand-computed entries") {
  // gamma = 0.04 + 4*0.01 = 0.08, gamma^2 = 0.0064.
  const num::Matrix m = fisher_controlled_unknown(tiny_params(), tiny_stats());
  CHECK(m.dim() == 5);
  CHECK(m(0, 0) == near(87.5));     // n/gamma + k/s2
  CHECK(m(0, 1) == near(100.0));    // n x_bar/gamma + k x0/s2
  CHECK(m(0, 2) == near(100.0));    // k beta/s2
  CHECK(m(0, 3) == near(0.0));
  CHECK(m(0, 4) == near(0.0));
  CHECK(m(1, 1) == near(187.875));  // sum x^2/gamma + 2n b^2 sd2^2/g^2 + k x0^2/s2
  CHECK(m(1, 2) == near(50.0));     // k beta x0/s2
  CHECK(m(1, 3) == near(37.5));     // n beta^3 sd2/g^2
  CHECK(m(1, 4) == near(9.375));    // n beta sd2/g^2
  CHECK(m(2, 2) == near(200.0));    // k beta^2/s2
  CHECK(m(2, 3) == near(0.0));
  CHECK(m(2, 4) == near(0.0));
  CHECK(m(3, 3) == near(3750.0));   // n beta^4/(2 g^2)
  CHECK(m(3, 4) == near(937.5));    // n beta^2/(2 g^2)
  CHECK(m(4, 4) == near(859.375));  // n/(2 g^2) + k/(2 s2^2)
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(m(i, j) == m(j, i));
}

TEST_CASE("known-variance information drops exactly one row and column") {
  const num::Matrix full = fisher_controlled_unknown(tiny_params(), tiny_stats());
  const num::Matrix m = fisher_controlled_known(tiny_params(), tiny_stats());
  CHECK(m.dim() == 4);
  const std::size_t keep[4] = {0, 1, 2, 4};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(m(i, j) == full(keep[i], keep[j]));
  CHECK(m(1, 3) == near(9.375));
  CHECK(m(3, 3) == near(859.375));
}

TEST_CASE("variance approximations match rational-arithmetic references") {
  // n = k = 100 on the even design over [0,2]: x_bar = 1, s_xx = 101/297.
  SufficientStats st;
  st.n = 100;
  st.k = 100;
  st.x_bar = 1.0;
  st.s_xx = 101.0 / 297.0;

  ControlledParams p;
  p.beta = 2.0;
  p.x0 = 0.8;
  p.sigma_delta_sq = 0.01;
  p.sigma_eps_sq = 0.04;

  CHECK(variance_v1_controlled(p, st) == near(0.00032352475247524753));
  CHECK(bias_controlled(p, st) == near(-0.00011762376237623763));
  CHECK(variance_v2_controlled(p, st) == near(0.0003237011881188119));
}

TEST_CASE("known-variance formula agrees with the information inverse") {
  const ControlledParams p = tiny_params();
  const SufficientStats st = tiny_stats();
  const double direct = variance_known_delta(p, st);
  const num::Matrix inv = num::invert(fisher_controlled_known(p, st));
  CHECK(direct == doctest::Approx(inv(2, 2)).epsilon(1e-10));
  CHECK(direct > 0.0);
}

TEST_CASE("known-variance formula rejects a spreadless design") {
  ControlledParams p = tiny_params();
  SufficientStats st = tiny_stats();
  st.s_xx = 0.0;
  p.sigma_delta_sq = 0.0;  // kills the second denominator term too
  CHECK_THROWS_AS((void)variance_known_delta(p, st), SingularInformation);
}

TEST_CASE("confidence interval uses the two-sided normal quantile") {
  const auto [lo, hi] = confidence_interval(1.0, 4.0, 0.95);
  const double half = 1.9599639845400543 * 2.0;
  CHECK(lo == near(1.0 - half));
  CHECK(hi == near(1.0 + half));
  CHECK(interval_amplitude(4.0, 0.95) == near(2.0 * half));
}

TEST_CASE("a zero variance degenerates to a point interval") {
  const auto [lo, hi] = confidence_interval(0.7, 0.0, 0.95);
  CHECK(lo == 0.7);
  CHECK(hi == 0.7);
  CHECK(interval_amplitude(0.0, 0.95) == 0.0);
}

TEST_CASE("interval helpers reject invalid inputs") {
  CHECK_THROWS_AS((void)confidence_interval(0.0, 1.0, 0.0), InvalidLevel);
  CHECK_THROWS_AS((void)confidence_interval(0.0, 1.0, 1.0), InvalidLevel);
  CHECK_THROWS_AS((void)confidence_interval(0.0, -1.0, 0.95),
                  NonPositiveVariance);
  CHECK_THROWS_AS((void)interval_amplitude(-1.0, 0.95), NonPositiveVariance);
  CHECK_THROWS_AS((void)interval_amplitude(1.0, 1.5), InvalidLevel);
}

TEST_CASE("uncertainty report bundles interval, bias and level") {
  const UncertaintyReport r = uncertainty_report(
      VarianceFormula::V1_Controlled, 0.5, 0.0004, -0.0001, 0.95);
  CHECK(r.variance_formula == VarianceFormula::V1_Controlled);
  CHECK(r.variance == 0.0004);
  CHECK(r.bias == -0.0001);
  CHECK(r.confidence_level == 0.95);
  const double half = 1.9599639845400543 * 0.02;
  CHECK(r.ci_lower == near(0.5 - half));
  CHECK(r.ci_upper == near(0.5 + half));

  CHECK_THROWS_AS((void)uncertainty_report(VarianceFormula::V1_Usual, 0.0,
                                           0.0, 0.0, 0.95),
                  NonPositiveVariance);
  CHECK_THROWS_AS((void)uncertainty_report(VarianceFormula::V1_Usual, 0.0,
                                           -1.0, 0.0, 0.95),
                  NonPositiveVariance);
}
