#include "calib/data.hpp"

#include <cmath>

#include "calib/errors.hpp"

namespace calib {

void validate(const CalibrationData& data) {
  if (data.first_stage.size() < 3)
    throw TooFewPoints("first stage needs at least 3 points, got " +
                       std::to_string(data.first_stage.size()));
  if (data.second_stage.size() < 2)
    throw TooFewPoints("second stage needs at least 2 readings, got " +
                       std::to_string(data.second_stage.size()));
  for (const auto& [x, y] : data.first_stage)
    if (!std::isfinite(x) || !std::isfinite(y))
      throw NonFinite("non-finite value in first stage");
  for (double y0 : data.second_stage)
    if (!std::isfinite(y0)) throw NonFinite("non-finite value in second stage");

  const double x0 = data.first_stage.front().first;
  bool all_equal = true;
  for (const auto& [x, y] : data.first_stage)
    if (x != x0) {
      all_equal = false;
      break;
    }
  if (all_equal)
    throw DegenerateDesign("all first-stage x values are identical");
}

SufficientStats summarize(const CalibrationData& data) {
  validate(data);

  SufficientStats s;
  s.n = data.first_stage.size();
  s.k = data.second_stage.size();

  double sum_x = 0.0, sum_y = 0.0;
  for (const auto& [x, y] : data.first_stage) {
    sum_x += x;
    sum_y += y;
  }
  s.x_bar = sum_x / static_cast<double>(s.n);
  s.y_bar = sum_y / static_cast<double>(s.n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0, sum_x_sq = 0.0;
  for (const auto& [x, y] : data.first_stage) {
    const double dx = x - s.x_bar;
    const double dy = y - s.y_bar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
    sum_x_sq += x * x;
  }
  s.s_xx = sxx / static_cast<double>(s.n);
  s.s_xy = sxy / static_cast<double>(s.n);
  s.s_yy = syy / static_cast<double>(s.n);
  s.sum_x_sq = sum_x_sq;

  double sum_y0 = 0.0;
  for (double y0 : data.second_stage) sum_y0 += y0;
  s.y0_bar = sum_y0 / static_cast<double>(s.k);
  double sy0 = 0.0;
  for (double y0 : data.second_stage) {
    const double d = y0 - s.y0_bar;
    sy0 += d * d;
  }
  s.s_y0y0 = sy0 / static_cast<double>(s.k);
  return s;
}

}  // namespace calib
