#pragma once

#include "calib/data.hpp"
#include "calib/numerics/newton.hpp"

namespace calib {

// Which error-variance regime the controlled-calibration fit ran under.
enum class DeltaCase {
  UnknownDelta,  // sigma_delta_sq estimated from the data (closed form)
  KnownDelta,    // sigma_delta_sq supplied; score equations solved by Newton
};

// Fit of the controlled (fixed-nominal-x) calibration model, where the
// first-stage composite error has variance gamma = beta^2 sigma_delta_sq +
// sigma_eps_sq while the second stage keeps variance sigma_eps_sq.
struct ControlledFit {
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double x0_hat = 0.0;
  double sigma_eps_sq_hat = 0.0;
  double sigma_delta_sq_hat = 0.0;
  double gamma_hat = 0.0;
  DeltaCase delta_case = DeltaCase::UnknownDelta;

  // UnknownDelta only: the raw moment estimate of sigma_delta_sq came out
  // negative (kept as-is, not clamped; gamma_hat stays valid regardless).
  bool negative_variance_estimate = false;

  // KnownDelta only: Newton iteration count and final scaled residual.
  int iterations = 0;
  double max_scaled_residual = 0.0;
};

// Parameter point for controlled-model information matrices, variance
// approximations, and likelihoods.
struct ControlledParams {
  double alpha = 0.0;
  double beta = 0.0;
  double x0 = 0.0;
  double sigma_delta_sq = 0.0;
  double sigma_eps_sq = 0.0;

  double gamma() const { return sigma_eps_sq + beta * beta * sigma_delta_sq; }
};

// Closed-form MLE when sigma_delta_sq is unknown:
//   beta_hat = s_xy/s_xx, sigma_eps_sq_hat = s_y0y0,
//   sigma_delta_sq_hat = (R(beta_hat) - s_y0y0)/beta_hat^2,
//   gamma_hat = s_yy - s_xy^2/s_xx (= R(beta_hat), always >= 0).
// A negative sigma_delta_sq_hat is flagged, not raised.
// Throws ZeroSlope when the slope is too small to invert the line.
ControlledFit fit_unknown_delta(const SufficientStats& stats);

// MLE when sigma_delta_sq >= 0 is known: solves the two score equations in
// (beta, sigma_eps_sq) by damped Newton from the init (s_xy/s_xx, s_y0y0).
// If that stalls, retries from the pooled-variance init, then from the root
// of the second score in sigma_eps_sq at fixed slope (located by geometric
// bracketing + bisection, a sign change being guaranteed). Throws
// NoConvergence when every start fails, ZeroSlope on an uninvertible slope.
ControlledFit fit_known_delta(const SufficientStats& stats,
                              double sigma_delta_sq,
                              const num::SolverConfig& cfg = {});

// Log-likelihood of the controlled model at p (serves both cases; in the
// known case the caller holds sigma_delta_sq fixed).
double log_likelihood_controlled(const ControlledParams& p,
                                 const CalibrationData& data);

}  // namespace calib
