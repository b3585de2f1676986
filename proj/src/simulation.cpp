#include "calib/simulation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "calib/controlled.hpp"
#include "calib/errors.hpp"
#include "calib/numerics/normal.hpp"
#include "calib/numerics/rng.hpp"
#include "calib/usual.hpp"

namespace calib {

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::UsualM: return "usual";
    case Estimator::ProposedUnknown: return "proposed_unknown";
    case Estimator::ProposedKnown: return "proposed_known";
  }
  return "unknown";
}

std::vector<double> design_points(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

namespace {

void validate_config(const SimConfig& cfg) {
  if (cfg.n < 3 || cfg.k < 2)
    throw TooFewPoints("simulation cell needs n >= 3 and k >= 2");
  if (cfg.replications < 1)
    throw ValidationError("simulation cell needs replications >= 1");
  if (!(cfg.sigma_eps_sq >= 0.0) || !(cfg.sigma_delta_sq >= 0.0))
    throw ValidationError("error variances must be >= 0");
  if (!(cfg.confidence_level > 0.0 && cfg.confidence_level < 1.0))
    throw InvalidLevel("confidence level must lie strictly between 0 and 1");
  if (cfg.estimators.empty())
    throw ValidationError("simulation cell needs at least one estimator");
  for (double v : {cfg.x0_true, cfg.alpha_true, cfg.beta_true,
                   cfg.sigma_eps_sq, cfg.sigma_delta_sq})
    if (!std::isfinite(v)) throw NonFinite("non-finite simulation parameter");
}

std::uint64_t hash_param(std::uint64_t h, const char* name, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.17g;", name, v);
  return num::hash_token(h, buf);
}

}  // namespace

std::uint64_t cell_stream_id(const SimConfig& cfg) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV offset basis
  h = hash_param(h, "n", static_cast<double>(cfg.n));
  h = hash_param(h, "k", static_cast<double>(cfg.k));
  h = hash_param(h, "x0", cfg.x0_true);
  h = hash_param(h, "alpha", cfg.alpha_true);
  h = hash_param(h, "beta", cfg.beta_true);
  h = hash_param(h, "se2", cfg.sigma_eps_sq);
  h = hash_param(h, "sd2", cfg.sigma_delta_sq);
  std::uint64_t s = h;
  return num::splitmix64(s);
}

CalibrationData generate_dataset(const SimConfig& cfg,
                                 std::uint64_t replicate_index) {
  validate_config(cfg);
  num::NormalStream stream(cfg.seed, cell_stream_id(cfg), replicate_index);
  const std::vector<double> x = design_points(cfg.n);
  const double se = std::sqrt(cfg.sigma_eps_sq);
  const double sd = std::sqrt(cfg.sigma_delta_sq);

  CalibrationData data;
  data.first_stage.reserve(cfg.n);
  for (double xi : x) {
    const double eps = stream.next_normal(0.0, se);
    const double delta = stream.next_normal(0.0, sd);
    data.first_stage.emplace_back(
        xi, cfg.alpha_true + cfg.beta_true * xi + (eps - cfg.beta_true * delta));
  }
  data.second_stage.reserve(cfg.k);
  const double mu0 = cfg.alpha_true + cfg.beta_true * cfg.x0_true;
  for (std::size_t j = 0; j < cfg.k; ++j)
    data.second_stage.push_back(mu0 + stream.next_normal(0.0, se));
  return data;
}

namespace {

struct FormulaAcc {
  VarianceFormula formula;
  double sum_variance = 0.0;
  double sum_amplitude = 0.0;
  std::size_t covered = 0;
  std::size_t degenerate = 0;
};

struct EstimatorAcc {
  Estimator estimator;
  double sum_dx = 0.0;
  double sum_dx_sq = 0.0;
  std::size_t successes = 0;
  std::size_t failed = 0;
  std::vector<FormulaAcc> formulas;
};

// The formulas reported for each estimator, in output order.
std::vector<VarianceFormula> formulas_for(Estimator e) {
  switch (e) {
    case Estimator::UsualM:
      return {VarianceFormula::V1_Usual};
    case Estimator::ProposedUnknown:
      return {VarianceFormula::V1_Controlled, VarianceFormula::V2_Controlled};
    case Estimator::ProposedKnown:
      return {VarianceFormula::V_KnownDelta};
  }
  return {};
}

double theoretical_variance(VarianceFormula f, const SimConfig& cfg,
                            const SufficientStats& design) {
  const UsualParams up{cfg.alpha_true, cfg.beta_true, cfg.x0_true,
                       cfg.sigma_eps_sq};
  const ControlledParams cp{cfg.alpha_true, cfg.beta_true, cfg.x0_true,
                            cfg.sigma_delta_sq, cfg.sigma_eps_sq};
  switch (f) {
    case VarianceFormula::V1_Usual: return variance_v1_usual(up, design);
    case VarianceFormula::V2_Usual: return variance_v2_usual(up, design);
    case VarianceFormula::V1_Controlled:
      return variance_v1_controlled(cp, design);
    case VarianceFormula::V2_Controlled:
      return variance_v2_controlled(cp, design);
    case VarianceFormula::V_KnownDelta:
      return variance_known_delta(cp, design);
  }
  return 0.0;
}

// One replication of one estimator: x0_hat plus the plug-in variance per
// formula. Throws NumericalError subclasses on fit failure.
struct RepOutcome {
  double x0_hat = 0.0;
  std::vector<double> variances;
};

RepOutcome run_one(Estimator e, const SimConfig& cfg,
                   const SufficientStats& stats) {
  RepOutcome out;
  switch (e) {
    case Estimator::UsualM: {
      const UsualFit f = fit_usual(stats);
      const UsualParams p{f.alpha_hat, f.beta_hat, f.x0_hat,
                          f.sigma_eps_sq_hat};
      out.x0_hat = f.x0_hat;
      out.variances = {variance_v1_usual(p, stats)};
      return out;
    }
    case Estimator::ProposedUnknown: {
      const ControlledFit f = fit_unknown_delta(stats);
      const ControlledParams p{f.alpha_hat, f.beta_hat, f.x0_hat,
                               f.sigma_delta_sq_hat, f.sigma_eps_sq_hat};
      out.x0_hat = f.x0_hat;
      out.variances = {variance_v1_controlled(p, stats),
                       variance_v2_controlled(p, stats)};
      return out;
    }
    case Estimator::ProposedKnown: {
      const ControlledFit f = fit_known_delta(stats, cfg.sigma_delta_sq);
      const ControlledParams p{f.alpha_hat, f.beta_hat, f.x0_hat,
                               cfg.sigma_delta_sq, f.sigma_eps_sq_hat};
      out.x0_hat = f.x0_hat;
      out.variances = {variance_known_delta(p, stats)};
      return out;
    }
  }
  throw Error("unreachable estimator");
}

}  // namespace

SimSummary run_cell(const SimConfig& cfg) {
  validate_config(cfg);

  // Design-only statistics carry every input the theoretical formulas read.
  SufficientStats design;
  {
    CalibrationData d;
    for (double xi : design_points(cfg.n)) d.first_stage.emplace_back(xi, 0.0);
    d.second_stage.assign(cfg.k, 0.0);
    design = summarize(d);
  }

  std::vector<EstimatorAcc> accs;
  for (Estimator e : {Estimator::UsualM, Estimator::ProposedUnknown,
                      Estimator::ProposedKnown}) {
    if (!cfg.estimators.count(e)) continue;
    EstimatorAcc a;
    a.estimator = e;
    for (VarianceFormula f : formulas_for(e)) a.formulas.push_back({f});
    accs.push_back(std::move(a));
  }

  const double z = num::std_normal_quantile(0.5 * (1.0 + cfg.confidence_level));

  for (std::uint64_t rep = 0; rep < cfg.replications; ++rep) {
    const CalibrationData data = generate_dataset(cfg, rep);
    const SufficientStats stats = summarize(data);
    for (EstimatorAcc& acc : accs) {
      RepOutcome o;
      try {
        o = run_one(acc.estimator, cfg, stats);
      } catch (const NumericalError&) {
        ++acc.failed;
        continue;
      }
      bool usable = true;
      for (double v : o.variances)
        if (!std::isfinite(v) || v < 0.0) usable = false;
      if (!usable) {
        ++acc.failed;
        continue;
      }
      const double dx = o.x0_hat - cfg.x0_true;
      acc.sum_dx += dx;
      acc.sum_dx_sq += dx * dx;
      ++acc.successes;
      for (std::size_t i = 0; i < acc.formulas.size(); ++i) {
        FormulaAcc& fa = acc.formulas[i];
        const double v = o.variances[i];
        const double half = z * std::sqrt(v);
        fa.sum_variance += v;
        fa.sum_amplitude += 2.0 * half;
        if (v == 0.0) ++fa.degenerate;
        if (o.x0_hat - half <= cfg.x0_true && cfg.x0_true <= o.x0_hat + half)
          ++fa.covered;
      }
    }
  }

  bool any_success = false;
  for (const EstimatorAcc& acc : accs) any_success |= acc.successes > 0;
  if (!any_success)
    throw AllReplicationsFailed("every replication failed in cell (n=" +
                                std::to_string(cfg.n) + ", k=" +
                                std::to_string(cfg.k) + ")");

  SimSummary out;
  out.config = cfg;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const EstimatorAcc& acc : accs) {
    EstimatorSummary es;
    es.estimator = acc.estimator;
    es.n_failed = acc.failed;
    const double m = static_cast<double>(acc.successes);
    es.empirical_bias = acc.successes ? acc.sum_dx / m : nan;
    es.empirical_mse = acc.successes ? acc.sum_dx_sq / m : nan;
    for (const FormulaAcc& fa : acc.formulas) {
      FormulaSummary fs;
      fs.formula = fa.formula;
      fs.theoretical_variance = theoretical_variance(fa.formula, cfg, design);
      fs.mean_estimated_variance = acc.successes ? fa.sum_variance / m : nan;
      fs.coverage_pct =
          acc.successes ? 100.0 * static_cast<double>(fa.covered) / m : nan;
      fs.mean_amplitude = acc.successes ? fa.sum_amplitude / m : nan;
      fs.n_degenerate = fa.degenerate;
      es.formulas.push_back(fs);
    }
    out.estimators.push_back(std::move(es));
  }
  return out;
}

std::vector<SimSummary> run_grid(const std::vector<SimConfig>& cells,
                                 unsigned threads) {
  for (const SimConfig& cfg : cells) validate_config(cfg);

  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  threads = std::min<unsigned>(threads, std::max<std::size_t>(cells.size(), 1));

  std::vector<SimSummary> results(cells.size());
  std::vector<std::exception_ptr> failures(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        results[i] = run_cell(cells[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const std::exception_ptr& e : failures)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace calib
