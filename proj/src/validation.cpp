#include "calib/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "calib/controlled.hpp"
#include "calib/data.hpp"
#include "calib/inference.hpp"
#include "calib/numerics/hessian.hpp"
#include "calib/numerics/matrix.hpp"
#include "calib/numerics/rng.hpp"
#include "calib/simulation.hpp"
#include "calib/usual.hpp"

namespace calib {
namespace {

double uniform(num::NormalStream& s, double lo, double hi) {
  return lo + (hi - lo) * s.next_uniform();
}

struct RandomPoint {
  SufficientStats stats;
  double alpha, beta, x0, sigma_eps_sq;
};

RandomPoint random_point(num::NormalStream& s) {
  const std::size_t n = 3 + static_cast<std::size_t>(uniform(s, 0, 38));
  const std::size_t k = 2 + static_cast<std::size_t>(uniform(s, 0, 29));
  CalibrationData d;
  for (std::size_t i = 0; i < n; ++i)
    d.first_stage.emplace_back(uniform(s, -3, 3), 0.0);
  d.second_stage.assign(k, 0.0);
  RandomPoint p;
  p.stats = summarize(d);
  p.alpha = uniform(s, -5, 5);
  p.beta = uniform(s, 0.5, 5) * (s.next_uniform() < 0.5 ? -1.0 : 1.0);
  p.x0 = uniform(s, -2, 4);
  p.sigma_eps_sq = uniform(s, 0.01, 4);
  return p;
}

double rel_err(double got, double want) {
  const double scale = std::max({std::fabs(got), std::fabs(want), 1e-300});
  return std::fabs(got - want) / scale;
}

std::string detail_max(double worst, const char* what) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "max %s %.3g", what, worst);
  return buf;
}

CheckResult threshold_check(std::string name, double worst, double tol,
                            const char* what) {
  return {std::move(name), worst <= tol, detail_max(worst, what)};
}

// Mean and standard error of the negative numeric Hessian of `loglik` over
// `m` datasets drawn at the true parameters, compared entrywise against the
// closed-form information matrix.
CheckResult mc_hessian_check(
    std::string name, const SimConfig& cfg, std::uint64_t m,
    const std::vector<double>& theta,
    const std::function<double(const std::vector<double>&,
                               const CalibrationData&)>& loglik,
    const num::Matrix& info) {
  const std::size_t d = theta.size();
  num::Matrix sum(d), sumsq(d);
  for (std::uint64_t rep = 0; rep < m; ++rep) {
    const CalibrationData data = generate_dataset(cfg, rep);
    const num::Matrix h = num::numeric_hessian(
        [&](const std::vector<double>& x) { return loglik(x, data); }, theta);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        sum(i, j) += -h(i, j);
        sumsq(i, j) += h(i, j) * h(i, j);
      }
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double mean = sum(i, j) / static_cast<double>(m);
      const double var =
          std::max(0.0, sumsq(i, j) / static_cast<double>(m) - mean * mean);
      const double se = std::sqrt(var / static_cast<double>(m));
      const double tol = 3.0 * se + 1e-6 * std::sqrt(info(i, i) * info(j, j) +
                                                     info(i, j) * info(i, j));
      worst = std::max(worst, std::fabs(mean - info(i, j)) / tol);
    }
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "max |MC mean - closed form| / tol %.3g over %zu datasets",
                worst, static_cast<std::size_t>(m));
  return {std::move(name), worst <= 1.0, buf};
}

}  // namespace

std::vector<CheckResult> run_validation(bool fast, std::uint64_t seed) {
  std::vector<CheckResult> out;
  num::NormalStream rng(seed, num::hash_token(0xCBF29CE484222325ULL,
                                              "validation-suite"),
                        0);

  {  // Collapse of every controlled formula onto its usual counterpart.
    double w_v1 = 0, w_v2 = 0, w_bias = 0, w_known = 0;
    for (int t = 0; t < 100; ++t) {
      const RandomPoint p = random_point(rng);
      const UsualParams up{p.alpha, p.beta, p.x0, p.sigma_eps_sq};
      const ControlledParams cp{p.alpha, p.beta, p.x0, 0.0, p.sigma_eps_sq};
      w_v1 = std::max(w_v1, rel_err(variance_v1_controlled(cp, p.stats),
                                    variance_v1_usual(up, p.stats)));
      w_v2 = std::max(w_v2, rel_err(variance_v2_controlled(cp, p.stats),
                                    variance_v2_usual(up, p.stats)));
      w_bias = std::max(w_bias, rel_err(bias_controlled(cp, p.stats),
                                        bias_usual(up, p.stats)));
      w_known = std::max(w_known, rel_err(variance_known_delta(cp, p.stats),
                                          variance_v1_usual(up, p.stats)));
    }
    const char* what = "rel err over 100 points";
    out.push_back(threshold_check(
        "controlled v1 collapses to usual v1 at sigma_delta_sq = 0", w_v1,
        1e-12, what));
    out.push_back(threshold_check(
        "controlled v2 collapses to usual v2 at sigma_delta_sq = 0", w_v2,
        1e-12, what));
    out.push_back(threshold_check(
        "controlled bias collapses to usual bias at sigma_delta_sq = 0",
        w_bias, 1e-12, what));
    out.push_back(threshold_check(
        "known-delta variance collapses to usual v1 at sigma_delta_sq = 0",
        w_known, 1e-12, what));
  }

  {  // The (x0,x0) entry of each inverted information matrix must equal the
     // matching closed-form variance.
    double w_usual = 0, w_ctrl = 0, w_known = 0;
    for (int t = 0; t < 100; ++t) {
      const RandomPoint p = random_point(rng);
      const double sd2 = uniform(rng, 0.01, 1);
      const UsualParams up{p.alpha, p.beta, p.x0, p.sigma_eps_sq};
      const ControlledParams cp{p.alpha, p.beta, p.x0, sd2, p.sigma_eps_sq};
      w_usual = std::max(
          w_usual, rel_err(num::invert(fisher_usual(up, p.stats))(2, 2),
                           variance_v1_usual(up, p.stats)));
      w_ctrl = std::max(
          w_ctrl,
          rel_err(num::invert(fisher_controlled_unknown(cp, p.stats))(2, 2),
                  variance_v1_controlled(cp, p.stats)));
      w_known = std::max(
          w_known,
          rel_err(num::invert(fisher_controlled_known(cp, p.stats))(2, 2),
                  variance_known_delta(cp, p.stats)));
    }
    const char* what = "rel err over 100 points";
    out.push_back(threshold_check(
        "usual information inverse reproduces v1 at (x0, x0)", w_usual, 1e-10,
        what));
    out.push_back(threshold_check(
        "controlled information inverse reproduces v1 at (x0, x0)", w_ctrl,
        1e-10, what));
    out.push_back(threshold_check(
        "known-delta information inverse reproduces its variance at (x0, x0)",
        w_known, 1e-10, what));
  }

  if (fast) return out;

  {  // Closed-form information vs Monte Carlo mean of the negative numeric
     // log-likelihood Hessian at the true parameters.
    const double a = 0.1, b = 2.0, x0 = 0.8, se2 = 0.04, sd2 = 0.01;
    SimConfig cfg;
    cfg.n = 20;
    cfg.k = 20;
    cfg.x0_true = x0;
    cfg.alpha_true = a;
    cfg.beta_true = b;
    cfg.sigma_eps_sq = se2;
    cfg.seed = seed;
    cfg.replications = 1;
    cfg.estimators = {Estimator::UsualM};
    const std::uint64_t m = 10000;

    SufficientStats design;
    {
      CalibrationData d;
      for (double xi : design_points(cfg.n)) d.first_stage.emplace_back(xi, 0.0);
      d.second_stage.assign(cfg.k, 0.0);
      design = summarize(d);
    }

    cfg.sigma_delta_sq = 0.0;
    out.push_back(mc_hessian_check(
        "usual information matches Monte Carlo mean Hessian", cfg, m,
        {a, b, x0, se2},
        [](const std::vector<double>& t, const CalibrationData& d) {
          return log_likelihood_usual({t[0], t[1], t[2], t[3]}, d);
        },
        fisher_usual({a, b, x0, se2}, design)));

    cfg.sigma_delta_sq = sd2;
    out.push_back(mc_hessian_check(
        "controlled information matches Monte Carlo mean Hessian", cfg, m,
        {a, b, x0, sd2, se2},
        [](const std::vector<double>& t, const CalibrationData& d) {
          return log_likelihood_controlled({t[0], t[1], t[2], t[3], t[4]}, d);
        },
        fisher_controlled_unknown({a, b, x0, sd2, se2}, design)));

    out.push_back(mc_hessian_check(
        "known-delta information matches Monte Carlo mean Hessian", cfg, m,
        {a, b, x0, se2},
        [sd2](const std::vector<double>& t, const CalibrationData& d) {
          return log_likelihood_controlled({t[0], t[1], t[2], sd2, t[3]}, d);
        },
        fisher_controlled_known({a, b, x0, sd2, se2}, design)));
  }

  {  // Empirical moments of x0_hat at a small-k cell against the closed-form
     // bias and v2 expansion.
    SimConfig cfg;
    cfg.n = 100;
    cfg.k = 2;
    cfg.x0_true = 1.9;
    cfg.alpha_true = 0.1;
    cfg.beta_true = 2.0;
    cfg.sigma_eps_sq = 0.04;
    cfg.sigma_delta_sq = 0.1;
    cfg.replications = 200000;
    cfg.seed = seed;
    cfg.estimators = {Estimator::ProposedUnknown};

    SufficientStats design;
    {
      CalibrationData d;
      for (double xi : design_points(cfg.n)) d.first_stage.emplace_back(xi, 0.0);
      d.second_stage.assign(cfg.k, 0.0);
      design = summarize(d);
    }
    const ControlledParams truth{cfg.alpha_true, cfg.beta_true, cfg.x0_true,
                                 cfg.sigma_delta_sq, cfg.sigma_eps_sq};
    const double bias_f = bias_controlled(truth, design);
    const double v2 = variance_v2_controlled(truth, design);

    const SimSummary sim = run_cell(cfg);
    const EstimatorSummary& es = sim.estimators.front();
    const double reps = static_cast<double>(cfg.replications);
    const double se_mean = std::sqrt(es.empirical_mse / reps);
    const double se_mse = std::sqrt(2.0 / reps) * es.empirical_mse;

    char buf[128];
    const double bias_gap = std::fabs(es.empirical_bias - bias_f);
    const double bias_tol = 4.0 * se_mean + 0.25 * std::fabs(bias_f);
    std::snprintf(buf, sizeof buf, "|MC %.3g - formula %.3g| vs tol %.3g",
                  es.empirical_bias, bias_f, bias_tol);
    out.push_back(
        {"bias expansion matches Monte Carlo moments", bias_gap <= bias_tol,
         buf});

    const double mse_want = v2 + bias_f * bias_f;
    const double mse_gap = std::fabs(es.empirical_mse - mse_want);
    const double mse_tol = 4.0 * se_mse + 0.05 * v2;
    std::snprintf(buf, sizeof buf, "|MC %.3g - formula %.3g| vs tol %.3g",
                  es.empirical_mse, mse_want, mse_tol);
    out.push_back(
        {"variance expansion matches Monte Carlo moments", mse_gap <= mse_tol,
         buf});
  }

  return out;
}

}  // namespace calib
