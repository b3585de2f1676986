#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "calib/errors.hpp"
#include "calib/numerics/hessian.hpp"
#include "calib/numerics/matrix.hpp"
#include "calib/numerics/newton.hpp"
#include "calib/numerics/normal.hpp"
#include "calib/numerics/rng.hpp"

using namespace calib;

TEST_CASE("matrix inverse reproduces a hand-inverted 2x2") {
  num::Matrix a(2);
  a(0, 0) = 4.0;
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  a(1, 1) = 3.0;
  const num::Matrix inv = num::invert(a);
  // det = 11, inverse = [[3,-1],[-1,4]]/11
  CHECK(inv(0, 0) == doctest::Approx(3.0 / 11.0).epsilon(1e-14));
  CHECK(inv(0, 1) == doctest::Approx(-1.0 / 11.0).epsilon(1e-14));
  CHECK(inv(1, 1) == doctest::Approx(4.0 / 11.0).epsilon(1e-14));
  CHECK(inv(0, 1) == inv(1, 0));
}

TEST_CASE("matrix inverse is an inverse across sizes") {
  num::NormalStream rng(11, 1, 0);
  for (std::size_t dim = 1; dim <= 5; ++dim) {
    // A = B B^T + dim * I is symmetric positive definite.
    num::Matrix b(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) b(i, j) = rng.next_normal(0, 1);
    num::Matrix a(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        double s = i == j ? static_cast<double>(dim) : 0.0;
        for (std::size_t l = 0; l < dim; ++l) s += b(i, l) * b(j, l);
        a(i, j) = s;
      }
    const num::Matrix inv = num::invert(a);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < dim; ++l) s += a(i, l) * inv(l, j);
        CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10).scale(1));
      }
  }
}

TEST_CASE("matrix inverse rejects asymmetric and singular input") {
  num::Matrix bad(2);
  bad(0, 0) = 1.0;
  bad(0, 1) = 2.0;
  bad(1, 0) = 0.5;
  bad(1, 1) = 1.0;
  CHECK_THROWS_AS((void)num::invert(bad), Error);

  num::Matrix sing(2);
  sing(0, 0) = 1.0;
  sing(0, 1) = 1.0;
  sing(1, 0) = 1.0;
  sing(1, 1) = 1.0;
  CHECK_THROWS_AS((void)num::invert(sing), SingularInformation);
}

TEST_CASE("matrix inverse enforces the condition guard") {
  num::Matrix a(2);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-14;  // cond ~ 1e14 > 1e12
  CHECK_THROWS_AS((void)num::invert(a), SingularInformation);
  CHECK_NOTHROW((void)num::invert(a, 1e15));
}

TEST_CASE("standard normal quantile matches reference values") {
  // Reference values computed with 30-digit erfinv.
  const struct {
    double p, z;
  } cases[] = {
      {0.5, 0.0},
      {0.975, 1.9599639845400543},
      {0.995, 2.575829303548901},
      {0.84, 0.9944578832097531},
      {0.025, -1.9599639845400543},
      {0.0000001, -5.1993375821928165},
      {0.9999999, 5.1993375821928165},
      {0.1, -1.2815515655446004},
      {0.62, 0.3054807880993973},
      {1e-15, -7.941345326170997},
  };
  for (const auto& c : cases)
    CHECK(num::std_normal_quantile(c.p) ==
          doctest::Approx(c.z).epsilon(1e-9).scale(1));
}

TEST_CASE("standard normal cdf matches reference values") {
  CHECK(num::std_normal_cdf(-3.5) ==
        doctest::Approx(0.00023262907903552504).epsilon(1e-13));
  CHECK(num::std_normal_cdf(-1.0) ==
        doctest::Approx(0.15865525393145705).epsilon(1e-13));
  CHECK(num::std_normal_cdf(0.3) ==
        doctest::Approx(0.6179114221889527).epsilon(1e-13));
  CHECK(num::std_normal_cdf(2.2) ==
        doctest::Approx(0.9860965524865014).epsilon(1e-13));
}

TEST_CASE("quantile and cdf are mutual inverses") {
  for (double p = 0.0005; p < 1.0; p += 0.0101) {
    const double x = num::std_normal_quantile(p);
    CHECK(num::std_normal_cdf(x) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("quantile rejects probabilities outside (0,1)") {
  CHECK_THROWS_AS((void)num::std_normal_quantile(0.0), InvalidLevel);
  CHECK_THROWS_AS((void)num::std_normal_quantile(1.0), InvalidLevel);
  CHECK_THROWS_AS((void)num::std_normal_quantile(-0.2), InvalidLevel);
  CHECK_THROWS_AS((void)num::std_normal_quantile(1.2), InvalidLevel);
}

TEST_CASE("normal stream is deterministic and keyed") {
  num::NormalStream a(42, 7, 3), b(42, 7, 3), c(42, 7, 4), d(43, 7, 3);
  bool all_equal_c = true, all_equal_d = true;
  for (int i = 0; i < 64; ++i) {
    const double va = a.next_uniform();
    CHECK(va == b.next_uniform());
    CHECK(va > 0.0);
    CHECK(va < 1.0);
    all_equal_c &= va == c.next_uniform();
    all_equal_d &= va == d.next_uniform();
  }
  CHECK_FALSE(all_equal_c);
  CHECK_FALSE(all_equal_d);
}

TEST_CASE("zero-sigma draws consume a position and return mu exactly") {
  num::NormalStream a(1, 2, 3), b(1, 2, 3);
  (void)a.next_normal(0.0, 1.0);
  (void)b.next_normal(0.0, 1.0);
  CHECK(a.next_normal(2.5, 0.0) == 2.5);
  (void)b.next_normal(2.5, 5.0);  // same position, different sigma
  // Both streams sit at the same position again.
  CHECK(a.next_normal(0.0, 1.0) == b.next_normal(0.0, 1.0));
}

TEST_CASE("normal stream moments are sane") {
  num::NormalStream s(2024, 9, 0);
  const int m = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = s.next_normal(0.0, 1.0);
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / m;
  const double var = sumsq / m - mean * mean;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("newton solver finds the root of a smooth 2x2 system") {
  // g1 = b^2 + s^2 - 5, g2 = b*s - 2 has the root (2, 1).
  const num::ResidualFn res = [](double b, double s) {
    return num::Residual2{b * b + s * s - 5.0, b * s - 2.0, 1.0, 1.0};
  };
  const num::JacobianFn jac = [](double b, double s) {
    return std::array<double, 4>{2.0 * b, 2.0 * s, s, b};
  };
  const num::NewtonResult r = num::solve_newton_2d(res, jac, 3.0, 0.5);
  CHECK(r.b == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.s == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.max_scaled_residual < 1e-10);
  CHECK(r.iterations > 0);
}

TEST_CASE("newton solver reports zero iterations when started at the root") {
  const num::ResidualFn res = [](double b, double s) {
    return num::Residual2{b - 2.0, s - 1.0, 1.0, 1.0};
  };
  const num::JacobianFn jac = [](double, double) {
    return std::array<double, 4>{1.0, 0.0, 0.0, 1.0};
  };
  const num::NewtonResult r = num::solve_newton_2d(res, jac, 2.0, 1.0);
  CHECK(r.iterations == 0);
  CHECK(r.b == 2.0);
  CHECK(r.s == 1.0);
}

TEST_CASE("newton solver raises on a hopeless system") {
  // Constant nonzero residual: singular Jacobian, no improving step.
  const num::ResidualFn res = [](double, double) {
    return num::Residual2{1.0, 1.0, 1.0, 1.0};
  };
  const num::JacobianFn jac = [](double, double) {
    return std::array<double, 4>{0.0, 0.0, 0.0, 0.0};
  };
  CHECK_THROWS_AS((void)num::solve_newton_2d(res, jac, 0.0, 1.0),
                  NoConvergence);
}

TEST_CASE("newton solver rejects an infeasible start") {
  const num::ResidualFn res = [](double, double s) -> std::optional<num::Residual2> {
    if (s <= 0.0) return std::nullopt;
    return num::Residual2{0.0, s - 1.0, 1.0, 1.0};
  };
  const num::JacobianFn jac = [](double, double) {
    return std::array<double, 4>{1.0, 0.0, 0.0, 1.0};
  };
  CHECK_THROWS_AS((void)num::solve_newton_2d(res, jac, 0.0, -1.0),
                  NoConvergence);
}

TEST_CASE("numeric hessian recovers the matrix of a quadratic") {
  // f(x) = 0.5 x' A x with fixed A; the Hessian is A everywhere.
  const double a00 = 2.0, a01 = -0.7, a11 = 1.3;
  const auto f = [&](const std::vector<double>& x) {
    return 0.5 * (a00 * x[0] * x[0] + 2.0 * a01 * x[0] * x[1] +
                  a11 * x[1] * x[1]);
  };
  const num::Matrix h = num::numeric_hessian(f, {0.4, -1.1});
  CHECK(h(0, 0) == doctest::Approx(a00).epsilon(1e-7));
  CHECK(h(0, 1) == doctest::Approx(a01).epsilon(1e-7));
  CHECK(h(1, 0) == doctest::Approx(a01).epsilon(1e-7));
  CHECK(h(1, 1) == doctest::Approx(a11).epsilon(1e-7));
}
