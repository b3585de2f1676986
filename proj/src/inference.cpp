#include "calib/inference.hpp"

#include <cmath>

#include "calib/errors.hpp"
#include "calib/numerics/normal.hpp"

namespace calib {

std::string to_string(VarianceFormula f) {
  switch (f) {
    case VarianceFormula::V1_Usual: return "v1_usual";
    case VarianceFormula::V2_Usual: return "v2_usual";
    case VarianceFormula::V1_Controlled: return "v1_controlled";
    case VarianceFormula::V2_Controlled: return "v2_controlled";
    case VarianceFormula::V_KnownDelta: return "v_known_delta";
  }
  return "unknown";
}

num::Matrix fisher_controlled_unknown(const ControlledParams& p,
                                      const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double s2 = p.sigma_eps_sq;
  const double sd2 = p.sigma_delta_sq;
  const double g = p.gamma();
  const double g2 = g * g;
  const double b = p.beta;

  num::Matrix m(5);
  m(0, 0) = n / g + k / s2;
  m(0, 1) = n * stats.x_bar / g + k * p.x0 / s2;
  m(0, 2) = k * b / s2;
  m(1, 1) = stats.sum_x_sq / g + 2.0 * n * b * b * sd2 * sd2 / g2 +
            k * p.x0 * p.x0 / s2;
  m(1, 2) = k * b * p.x0 / s2;
  m(1, 3) = n * b * b * b * sd2 / g2;
  m(1, 4) = n * b * sd2 / g2;
  m(2, 2) = k * b * b / s2;
  m(3, 3) = n * b * b * b * b / (2.0 * g2);
  m(3, 4) = n * b * b / (2.0 * g2);
  m(4, 4) = n / (2.0 * g2) + k / (2.0 * s2 * s2);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
  return m;
}

num::Matrix fisher_controlled_known(const ControlledParams& p,
                                    const SufficientStats& stats) {
  const num::Matrix full = fisher_controlled_unknown(p, stats);
  // Drop the sigma_delta_sq row and column (index 3 of 5).
  num::Matrix m(4);
  const std::size_t keep[4] = {0, 1, 2, 4};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = full(keep[i], keep[j]);
  return m;
}

double variance_v1_controlled(const ControlledParams& p,
                              const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double s2 = p.sigma_eps_sq;
  const double g = p.gamma();
  const double d = stats.x_bar - p.x0;
  return s2 / (p.beta * p.beta) *
         (1.0 / k + g / (n * s2) + (g / s2) * d * d / (n * stats.s_xx));
}

double bias_controlled(const ControlledParams& p,
                       const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  return p.gamma() * (p.x0 - stats.x_bar) /
         (n * p.beta * p.beta * stats.s_xx);
}

double variance_v2_controlled(const ControlledParams& p,
                              const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double b2 = p.beta * p.beta;
  return variance_v1_controlled(p, stats) +
         3.0 * p.gamma() * p.sigma_eps_sq / (n * k * b2 * b2 * stats.s_xx);
}

double variance_known_delta(const ControlledParams& p,
                            const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double s2 = p.sigma_eps_sq;
  const double sd2 = p.sigma_delta_sq;
  const double g = p.gamma();
  const double b2 = p.beta * p.beta;

  // Design-information blend; positive whenever the design has spread.
  const double w = n * s2 * s2 + k * g * g;
  const double denom = n * stats.s_xx * w + 2.0 * n * k * b2 * g * sd2 * sd2;
  if (!(denom > 0.0))
    throw SingularInformation(
        "known-delta variance: non-positive design denominator");
  const double d = p.x0 - stats.x_bar;
  const double e = w * d * d / denom;
  return s2 / b2 * (1.0 / k + g / (n * s2) + (g / s2) * e);
}

std::pair<double, double> confidence_interval(double x0_hat, double variance,
                                              double level) {
  if (!(level > 0.0 && level < 1.0))
    throw InvalidLevel("confidence level must lie strictly between 0 and 1");
  if (variance < 0.0)
    throw NonPositiveVariance("negative variance in confidence interval");
  const double z = num::std_normal_quantile(0.5 * (1.0 + level));
  const double half = z * std::sqrt(variance);
  return {x0_hat - half, x0_hat + half};
}

double interval_amplitude(double variance, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw InvalidLevel("confidence level must lie strictly between 0 and 1");
  if (variance < 0.0)
    throw NonPositiveVariance("negative variance in interval amplitude");
  const double z = num::std_normal_quantile(0.5 * (1.0 + level));
  return 2.0 * z * std::sqrt(variance);
}

UncertaintyReport uncertainty_report(VarianceFormula formula, double x0_hat,
                                     double variance, double bias,
                                     double level) {
  if (!(variance > 0.0))
    throw NonPositiveVariance("uncertainty report requires variance > 0");
  UncertaintyReport r;
  r.variance_formula = formula;
  r.variance = variance;
  r.bias = bias;
  r.confidence_level = level;
  std::tie(r.ci_lower, r.ci_upper) = confidence_interval(x0_hat, variance, level);
  return r;
}

}  // namespace calib
