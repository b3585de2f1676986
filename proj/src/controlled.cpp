#include "calib/controlled.hpp"

#include <cmath>
#include <optional>

#include "calib/errors.hpp"

namespace calib {

namespace {

double residual_quadratic(double b, const SufficientStats& s) {
  return s.s_yy - 2.0 * b * s.s_xy + b * b * s.s_xx;
}

void require_invertible_slope(double beta, double numerator) {
  if (std::abs(beta) < 1e-12 * std::max(1.0, std::abs(numerator)))
    throw ZeroSlope("fitted slope " + std::to_string(beta) +
                    " too small to invert the calibration line");
}

// Score residuals of the known-delta case. g1 is the slope score scaled by
// gamma*sigma^2; g2 is the variance score, whose natural scale is the
// largest of its four terms.
std::optional<num::Residual2> known_delta_residual(
    double b, double s, double sd2, const SufficientStats& st) {
  if (!(s > 0.0)) return std::nullopt;
  const double n = static_cast<double>(st.n);
  const double k = static_cast<double>(st.k);
  const double gamma = s + b * b * sd2;
  if (!(gamma > 0.0)) return std::nullopt;
  const double r = residual_quadratic(b, st);

  num::Residual2 out;
  out.g1 = b * sd2 * (gamma - st.s_yy + b * st.s_xy) -
           (st.s_xy - b * st.s_xx) * s;
  const double t1 = k * st.s_y0y0 / (s * s);
  const double t2 = -k / s;
  const double t3 = -n / gamma;
  const double t4 = n * r / (gamma * gamma);
  out.g2 = t1 + t2 + t3 + t4;
  out.scale1 = gamma * s;
  out.scale2 = std::max(std::max(std::abs(t1), std::abs(t2)),
                        std::max(std::abs(t3), std::abs(t4)));
  return out;
}

std::array<double, 4> known_delta_jacobian(double b, double s, double sd2,
                                           const SufficientStats& st) {
  const double n = static_cast<double>(st.n);
  const double k = static_cast<double>(st.k);
  const double gamma = s + b * b * sd2;
  const double g2 = gamma * gamma;
  const double g3 = g2 * gamma;
  const double r = residual_quadratic(b, st);
  const double rp = -2.0 * (st.s_xy - b * st.s_xx);

  return {
      sd2 * (gamma - st.s_yy + b * st.s_xy) +
          b * sd2 * (2.0 * b * sd2 + st.s_xy) + st.s_xx * s,
      b * sd2 - (st.s_xy - b * st.s_xx),
      2.0 * n * b * sd2 / g2 + n * rp / g2 - 4.0 * n * r * b * sd2 / g3,
      -2.0 * k * st.s_y0y0 / (s * s * s) + k / (s * s) + n / g2 -
          2.0 * n * r / g3,
  };
}

// Root of the variance score in s at fixed slope, by geometric bracketing.
// The score tends to +inf as s -> 0+ and to 0- as s -> inf, so a sign
// change always exists; bisection cannot be defeated by curvature.
std::optional<double> bisect_variance_score(double b, double sd2, double hint,
                                            const SufficientStats& st) {
  auto g2 = [&](double s) -> std::optional<double> {
    auto r = known_delta_residual(b, s, sd2, st);
    if (!r || !std::isfinite(r->g2)) return std::nullopt;
    return r->g2;
  };
  if (!(hint > 0.0)) return std::nullopt;
  auto f0 = g2(hint);
  if (!f0) return std::nullopt;
  if (*f0 == 0.0) return hint;

  double lo = hint, hi = hint;
  if (*f0 > 0.0) {
    bool bracketed = false;
    for (int i = 0; i < 200; ++i) {
      hi *= 2.0;
      auto f = g2(hi);
      if (!f) return std::nullopt;
      if (*f <= 0.0) {
        bracketed = true;
        break;
      }
    }
    if (!bracketed) return std::nullopt;
  } else {
    bool bracketed = false;
    for (int i = 0; i < 200; ++i) {
      lo *= 0.5;
      auto f = g2(lo);
      if (!f) return std::nullopt;
      if (*f >= 0.0) {
        bracketed = true;
        break;
      }
    }
    if (!bracketed) return std::nullopt;
  }
  // Invariant: g2(lo) >= 0 >= g2(hi). Geometric midpoints cover the many
  // decades the bracket may span.
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-13; ++i) {
    const double mid = std::sqrt(lo * hi);
    auto f = g2(mid);
    if (!f) return std::nullopt;
    if (*f > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

ControlledFit fit_unknown_delta(const SufficientStats& stats) {
  ControlledFit f;
  f.delta_case = DeltaCase::UnknownDelta;
  f.beta_hat = stats.s_xy / stats.s_xx;
  f.alpha_hat = stats.y_bar - f.beta_hat * stats.x_bar;
  const double numerator = stats.y0_bar - f.alpha_hat;
  require_invertible_slope(f.beta_hat, numerator);
  f.x0_hat = numerator / f.beta_hat;

  f.sigma_eps_sq_hat = stats.s_y0y0;
  const double r = residual_quadratic(f.beta_hat, stats);
  // r is the first-stage residual variance, nonnegative up to rounding.
  f.gamma_hat = std::max(r, 0.0);
  f.sigma_delta_sq_hat =
      (r - stats.s_y0y0) / (f.beta_hat * f.beta_hat);
  f.negative_variance_estimate = f.sigma_delta_sq_hat < 0.0;
  return f;
}

ControlledFit fit_known_delta(const SufficientStats& stats,
                              double sigma_delta_sq,
                              const num::SolverConfig& cfg) {
  if (!(sigma_delta_sq >= 0.0) || !std::isfinite(sigma_delta_sq))
    throw ValidationError("sigma_delta_sq must be finite and >= 0");

  const double b_init = stats.s_xy / stats.s_xx;
  const double n = static_cast<double>(stats.n);
  const double k = static_cast<double>(stats.k);
  const double pooled =
      (n * residual_quadratic(b_init, stats) + k * stats.s_y0y0) / (n + k);

  auto residual = [&](double b, double s) {
    return known_delta_residual(b, s, sigma_delta_sq, stats);
  };
  auto jacobian = [&](double b, double s) {
    return known_delta_jacobian(b, s, sigma_delta_sq, stats);
  };

  std::optional<num::NewtonResult> solved;
  std::string last_error = "no feasible init";
  auto attempt = [&](double s_init) {
    if (solved || !(s_init > 0.0)) return;
    try {
      solved = num::solve_newton_2d(residual, jacobian, b_init, s_init, cfg);
    } catch (const NoConvergence& e) {
      last_error = e.what();
    }
  };

  attempt(stats.s_y0y0);
  attempt(pooled);
  if (!solved) {
    const double hint = stats.s_y0y0 > 0.0 ? stats.s_y0y0 : pooled;
    if (auto s_root = bisect_variance_score(b_init, sigma_delta_sq, hint, stats))
      attempt(*s_root);
  }
  if (!solved)
    throw NoConvergence("known-delta score equations: " + last_error);

  ControlledFit f;
  f.delta_case = DeltaCase::KnownDelta;
  f.beta_hat = solved->b;
  f.sigma_eps_sq_hat = solved->s;
  f.iterations = solved->iterations;
  f.max_scaled_residual = solved->max_scaled_residual;
  f.alpha_hat = stats.y_bar - f.beta_hat * stats.x_bar;
  const double numerator = stats.y0_bar - f.alpha_hat;
  require_invertible_slope(f.beta_hat, numerator);
  f.x0_hat = numerator / f.beta_hat;
  f.sigma_delta_sq_hat = sigma_delta_sq;
  f.gamma_hat = f.sigma_eps_sq_hat + f.beta_hat * f.beta_hat * sigma_delta_sq;
  return f;
}

double log_likelihood_controlled(const ControlledParams& p,
                                 const CalibrationData& data) {
  const double n = static_cast<double>(data.first_stage.size());
  const double k = static_cast<double>(data.second_stage.size());
  constexpr double kLog2Pi = 1.8378770664093454836;
  const double gamma = p.gamma();

  double ss1 = 0.0;
  for (const auto& [x, y] : data.first_stage) {
    const double r = y - p.alpha - p.beta * x;
    ss1 += r * r;
  }
  double ss2 = 0.0;
  const double mu0 = p.alpha + p.beta * p.x0;
  for (double y0 : data.second_stage) {
    const double r = y0 - mu0;
    ss2 += r * r;
  }
  return -0.5 * n * (kLog2Pi + std::log(gamma)) - ss1 / (2.0 * gamma) -
         0.5 * k * (kLog2Pi + std::log(p.sigma_eps_sq)) -
         ss2 / (2.0 * p.sigma_eps_sq);
}

}  // namespace calib
