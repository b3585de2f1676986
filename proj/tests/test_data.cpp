#include "doctest.h"

#include <cmath>
#include <limits>

#include "calib/data.hpp"
#include "calib/errors.hpp"

using namespace calib;

namespace {

CalibrationData tiny() {
  CalibrationData d;
  d.first_stage = {{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}};
  d.second_stage = {1.0, 3.0};
  return d;
}

}  // namespace

TEST_CASE("summarize reproduces hand-computed moments") {
  const SufficientStats st = summarize(tiny());
  CHECK(st.n == 3);
  CHECK(st.k == 2);
  CHECK(st.x_bar == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(st.y_bar == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(st.s_xx == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(st.s_xy == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(st.s_yy == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(st.sum_x_sq == doctest::Approx(14.0).epsilon(1e-15));
  CHECK(st.y0_bar == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(st.s_y0y0 == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("second moments use divisor n, not n-1") {
  CalibrationData d;
  d.first_stage = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}};
  d.second_stage = {0.0, 2.0};
  const SufficientStats st = summarize(d);
  // Population variance of {0,1,2,3} is 1.25; the n-1 version would be 5/3.
  CHECK(st.s_xx == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(st.s_y0y0 == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("centered moments survive a large common offset") {
  CalibrationData d;
  const double off = 1e9;
  d.first_stage = {{off + 1.0, 2.0}, {off + 2.0, 4.0}, {off + 3.0, 6.0}};
  d.second_stage = {1.0, 3.0};
  const SufficientStats st = summarize(d);
  CHECK(st.s_xx == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(st.s_xy == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("validate rejects datasets below the minimum sizes") {
  CalibrationData d = tiny();
  d.first_stage.pop_back();
  CHECK_THROWS_AS(validate(d), TooFewPoints);

  d = tiny();
  d.second_stage.pop_back();
  CHECK_THROWS_AS(validate(d), TooFewPoints);

  d = tiny();
  d.second_stage.clear();
  CHECK_THROWS_AS(validate(d), TooFewPoints);
}

TEST_CASE("validate rejects a flat design") {
  CalibrationData d;
  d.first_stage = {{1.5, 2.0}, {1.5, 4.0}, {1.5, 6.0}};
  d.second_stage = {1.0, 3.0};
  CHECK_THROWS_AS(validate(d), DegenerateDesign);
}

TEST_CASE("validate rejects non-finite values anywhere") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();

  CalibrationData d = tiny();
  d.first_stage[1].first = nan;
  CHECK_THROWS_AS(validate(d), NonFinite);

  d = tiny();
  d.first_stage[2].second = inf;
  CHECK_THROWS_AS(validate(d), NonFinite);

  d = tiny();
  d.second_stage[0] = -inf;
  CHECK_THROWS_AS(validate(d), NonFinite);
}

TEST_CASE("validate accepts a minimal usable dataset") {
  CHECK_NOTHROW(validate(tiny()));
}

TEST_CASE("validation errors share the taxonomy root") {
  CalibrationData d = tiny();
  d.first_stage.pop_back();
  CHECK_THROWS_AS(validate(d), ValidationError);
  CHECK_THROWS_AS(validate(d), Error);
}
