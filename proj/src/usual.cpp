#include "calib/usual.hpp"

#include <cmath>

#include "calib/errors.hpp"

namespace calib {

namespace {

// First-stage residual quadratic R(b) = s_yy - 2b s_xy + b^2 s_xx.
double residual_quadratic(double b, const SufficientStats& s) {
  return s.s_yy - 2.0 * b * s.s_xy + b * b * s.s_xx;
}

void require_invertible_slope(double beta, double numerator) {
  if (std::abs(beta) < 1e-12 * std::max(1.0, std::abs(numerator)))
    throw ZeroSlope("fitted slope " + std::to_string(beta) +
                    " too small to invert the calibration line");
}

}  // namespace

UsualFit fit_usual(const SufficientStats& stats) {
  UsualFit f;
  f.beta_hat = stats.s_xy / stats.s_xx;
  f.alpha_hat = stats.y_bar - f.beta_hat * stats.x_bar;
  const double numerator = stats.y0_bar - f.alpha_hat;
  require_invertible_slope(f.beta_hat, numerator);
  f.x0_hat = numerator / f.beta_hat;
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  f.sigma_eps_sq_hat =
      (n * residual_quadratic(f.beta_hat, stats) + k * stats.s_y0y0) / (n + k);
  return f;
}

num::Matrix fisher_usual(const UsualParams& p, const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double s2 = p.sigma_eps_sq;
  const double inv = 1.0 / s2;

  num::Matrix m(4);
  m(0, 0) = (n + k) * inv;
  m(0, 1) = (k * p.x0 + n * stats.x_bar) * inv;
  m(0, 2) = k * p.beta * inv;
  m(1, 1) = (k * p.x0 * p.x0 + stats.sum_x_sq) * inv;
  m(1, 2) = k * p.beta * p.x0 * inv;
  m(2, 2) = k * p.beta * p.beta * inv;
  m(3, 3) = (n + k) / (2.0 * s2 * s2);
  m(1, 0) = m(0, 1);
  m(2, 0) = m(0, 2);
  m(2, 1) = m(1, 2);
  return m;
}

double variance_v1_usual(const UsualParams& p, const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double d = stats.x_bar - p.x0;
  return p.sigma_eps_sq / (p.beta * p.beta) *
         (1.0 / k + 1.0 / n + d * d / (n * stats.s_xx));
}

double bias_usual(const UsualParams& p, const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  return p.sigma_eps_sq * (p.x0 - stats.x_bar) /
         (n * p.beta * p.beta * stats.s_xx);
}

double variance_v2_usual(const UsualParams& p, const SufficientStats& stats) {
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double b2 = p.beta * p.beta;
  return variance_v1_usual(p, stats) +
         3.0 * p.sigma_eps_sq * p.sigma_eps_sq / (n * k * b2 * b2 * stats.s_xx);
}

double log_likelihood_usual(const UsualParams& p,
                            const CalibrationData& data) {
  const double n = static_cast<double>(data.first_stage.size());
  const double k = static_cast<double>(data.second_stage.size());
  constexpr double kLog2Pi = 1.8378770664093454836;

  double ss = 0.0;
  for (const auto& [x, y] : data.first_stage) {
    const double r = y - p.alpha - p.beta * x;
    ss += r * r;
  }
  const double mu0 = p.alpha + p.beta * p.x0;
  for (double y0 : data.second_stage) {
    const double r = y0 - mu0;
    ss += r * r;
  }
  return -0.5 * (n + k) * (kLog2Pi + std::log(p.sigma_eps_sq)) -
         ss / (2.0 * p.sigma_eps_sq);
}

}  // namespace calib
