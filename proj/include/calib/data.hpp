#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace calib {

// Two-stage calibration dataset: standards (x_i, Y_i) measured first, then
// k repeat readings Y0_j of the unknown sample.
struct CalibrationData {
  std::vector<std::pair<double, double>> first_stage;  // (x, response)
  std::vector<double> second_stage;                    // responses only
};

// Sufficient statistics for every estimator in this library. Second moments
// use divisor n (first stage) and k (second stage), not n-1.
struct SufficientStats {
  std::size_t n = 0;
  std::size_t k = 0;
  double x_bar = 0.0;
  double y_bar = 0.0;
  double s_xx = 0.0;      // mean of (x - x_bar)^2
  double s_xy = 0.0;      // mean of (x - x_bar)(y - y_bar)
  double s_yy = 0.0;      // mean of (y - y_bar)^2
  double sum_x_sq = 0.0;  // sum of x_i^2
  double y0_bar = 0.0;
  double s_y0y0 = 0.0;    // mean of (y0 - y0_bar)^2
};

// Rejects datasets no estimator can use: n < 3 or k < 2 (TooFewPoints),
// all x equal (DegenerateDesign), any NaN/inf (NonFinite).
void validate(const CalibrationData& data);

// Validates, then computes the sufficient statistics with two-pass centered
// moments (means first, then centered sums) for numerical stability.
SufficientStats summarize(const CalibrationData& data);

}  // namespace calib
