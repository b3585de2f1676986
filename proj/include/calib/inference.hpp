#pragma once

#include <string>
#include <utility>

#include "calib/controlled.hpp"
#include "calib/data.hpp"
#include "calib/numerics/matrix.hpp"
#include "calib/usual.hpp"

namespace calib {

// The five x0 variance approximations this library can attach to a fit.
enum class VarianceFormula {
  V1_Usual,       // usual model, both stages large
  V2_Usual,       // usual model, fixed-k refinement
  V1_Controlled,  // controlled model, sigma_delta_sq unknown
  V2_Controlled,  // controlled model, fixed-k refinement
  V_KnownDelta,   // controlled model, sigma_delta_sq known
};

std::string to_string(VarianceFormula f);

// A variance, bias, and Wald interval for x0_hat under one formula.
struct UncertaintyReport {
  VarianceFormula variance_formula = VarianceFormula::V1_Usual;
  double variance = 0.0;  // > 0
  double bias = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double confidence_level = 0.0;
};

// Fisher information, order (alpha, beta, x0, sigma_delta_sq, sigma_eps_sq).
num::Matrix fisher_controlled_unknown(const ControlledParams& p,
                                      const SufficientStats& stats);

// Fisher information with sigma_delta_sq known, order
// (alpha, beta, x0, sigma_eps_sq).
num::Matrix fisher_controlled_known(const ControlledParams& p,
                                    const SufficientStats& stats);

// Large-n,k variance of x0_hat under the controlled model:
//   (sigma^2/beta^2) (1/k + gamma/(n sigma^2)
//                     + (gamma/sigma^2)(x_bar-x0)^2/(n s_xx)).
double variance_v1_controlled(const ControlledParams& p,
                              const SufficientStats& stats);

// Leading-order bias: gamma (x0 - x_bar) / (n beta^2 s_xx).
double bias_controlled(const ControlledParams& p, const SufficientStats& stats);

// v1 plus the fixed-k term 3 gamma sigma^2 / (n k beta^4 s_xx).
double variance_v2_controlled(const ControlledParams& p,
                              const SufficientStats& stats);

// Variance of x0_hat when sigma_delta_sq is known; equals the (x0,x0) entry
// of the inverse of fisher_controlled_known. Throws SingularInformation when
// the design-dependent denominator is not positive.
double variance_known_delta(const ControlledParams& p,
                            const SufficientStats& stats);

// Wald interval x0_hat +/- z * sqrt(variance). Requires level in (0,1)
// (InvalidLevel) and variance >= 0 (NonPositiveVariance); variance == 0
// gives the degenerate point interval.
std::pair<double, double> confidence_interval(double x0_hat, double variance,
                                              double level);

// Full-width of the Wald interval: 2 z sqrt(variance).
double interval_amplitude(double variance, double level);

// Bundles variance, bias, and interval; rejects variance <= 0.
UncertaintyReport uncertainty_report(VarianceFormula formula, double x0_hat,
                                     double variance, double bias,
                                     double level);

}  // namespace calib
