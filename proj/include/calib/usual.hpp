#pragma once

#include "calib/data.hpp"
#include "calib/numerics/matrix.hpp"

namespace calib {

// Maximum-likelihood fit of the classical calibration model: both stages
// share one error variance and the regressor is observed without error.
struct UsualFit {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double x0_hat = 0.0;
  double sigma_eps_sq_hat = 0.0;  // pooled over both stages
};

// Parameter point (true or fitted) at which information matrices, variance
// approximations, and likelihoods are evaluated.
struct UsualParams {
  double alpha = 0.0;
  double beta = 0.0;
  double x0 = 0.0;
  double sigma_eps_sq = 0.0;
};

// Closed-form MLE. The pooled variance is
// (n*R(beta_hat) + k*s_y0y0) / (n+k) with R(b) = s_yy - 2b*s_xy + b^2*s_xx.
// Throws ZeroSlope when the fitted slope is too small to invert the line.
UsualFit fit_usual(const SufficientStats& stats);

// Fisher information, parameter order (alpha, beta, x0, sigma_eps_sq).
num::Matrix fisher_usual(const UsualParams& p, const SufficientStats& stats);

// Large-n,k variance approximation of x0_hat:
//   (sigma^2/beta^2) * (1/k + 1/n + (x_bar - x0)^2 / (n*s_xx)).
double variance_v1_usual(const UsualParams& p, const SufficientStats& stats);

// Leading-order bias of x0_hat: sigma^2 (x0 - x_bar) / (n beta^2 s_xx).
double bias_usual(const UsualParams& p, const SufficientStats& stats);

// Fixed-k variance: v1 plus the second-order term 3 sigma^4/(n k beta^4 s_xx).
double variance_v2_usual(const UsualParams& p, const SufficientStats& stats);

// Log-likelihood of the full two-stage dataset at p.
double log_likelihood_usual(const UsualParams& p, const CalibrationData& data);

}  // namespace calib
