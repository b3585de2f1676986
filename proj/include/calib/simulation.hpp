#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "calib/data.hpp"
#include "calib/inference.hpp"

namespace calib {

// The three x0 estimators the Monte Carlo study compares.
enum class Estimator {
  UsualM,           // classical fit, ignores the controlled error structure
  ProposedUnknown,  // controlled fit, sigma_delta_sq estimated
  ProposedKnown,    // controlled fit, sigma_delta_sq known (the true value)
};

std::string to_string(Estimator e);

// One Monte Carlo cell: a data-generating configuration plus study settings.
struct SimConfig {
  std::size_t n = 0;
  std::size_t k = 0;
  double x0_true = 0.0;
  double alpha_true = 0.0;
  double beta_true = 0.0;
  double sigma_eps_sq = 0.0;
  double sigma_delta_sq = 0.0;
  std::size_t replications = 0;
  double confidence_level = 0.95;
  std::uint64_t seed = 0;
  std::set<Estimator> estimators;
};

// Per-formula slice of a cell summary.
struct FormulaSummary {
  VarianceFormula formula = VarianceFormula::V1_Usual;
  double mean_estimated_variance = 0.0;  // plug-in, averaged over successes
  double theoretical_variance = 0.0;     // formula at the true parameters
  double coverage_pct = 0.0;             // CIs containing x0_true, percent
  double mean_amplitude = 0.0;           // mean full Wald width
  std::size_t n_degenerate = 0;          // zero-variance CIs (still counted)
};

// Per-estimator slice: ratio metrics over its successful replications.
// All metric fields are NaN when every replication failed.
struct EstimatorSummary {
  Estimator estimator = Estimator::UsualM;
  double empirical_bias = 0.0;  // mean of (x0_hat - x0_true)
  double empirical_mse = 0.0;   // mean of (x0_hat - x0_true)^2
  std::size_t n_failed = 0;     // replications whose fit raised
  std::vector<FormulaSummary> formulas;
};

struct SimSummary {
  SimConfig config;
  std::vector<EstimatorSummary> estimators;
};

// The fixed first-stage design: n points evenly spaced on [0, 2].
std::vector<double> design_points(std::size_t n);

// Stream id of a cell, derived from the statistical parameters only
// (n, k, x0, alpha, beta, variances) rendered canonically: independent of
// grid position, replication count, estimator set, and confidence level.
std::uint64_t cell_stream_id(const SimConfig& cfg);

// Draws one dataset: first stage Y_i = alpha + beta X_i + (eps_i - beta
// delta_i) on the fixed design, second stage Y0_j = alpha + beta x0 + eps_j.
// Deterministic given (seed, cell id, replicate_index); the draw order is
// pinned (per first-stage point eps then delta, then the k second-stage
// draws) and positions are consumed even when a variance is zero.
CalibrationData generate_dataset(const SimConfig& cfg,
                                 std::uint64_t replicate_index);

// Runs all replications of one cell and aggregates per estimator and
// formula. Failed fits are counted in n_failed and excluded from averages;
// accumulation is sequential in replicate order so results are independent
// of scheduling. Throws AllReplicationsFailed when no estimator succeeded
// on any replication.
SimSummary run_cell(const SimConfig& cfg);

// Runs cells concurrently (threads == 0 picks hardware concurrency).
// Summaries come back in input order and are bit-identical for any thread
// count, because each cell's streams depend only on (seed, cell id,
// replicate index).
std::vector<SimSummary> run_grid(const std::vector<SimConfig>& cells,
                                 unsigned threads = 0);

}  // namespace calib
