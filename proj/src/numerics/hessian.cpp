#include "calib/numerics/hessian.hpp"

#include <cmath>

#include "calib/errors.hpp"

namespace calib::num {

Matrix numeric_hessian(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double rel_step, double floor) {
  const std::size_t d = x.size();
  Matrix h(d);
  std::vector<double> step(d);
  for (std::size_t i = 0; i < d; ++i)
    step[i] = rel_step * std::max(std::abs(x[i]), floor);

  const double f0 = f(x);
  std::vector<double> p = x;

  for (std::size_t i = 0; i < d; ++i) {
    p[i] = x[i] + step[i];
    const double fp = f(p);
    p[i] = x[i] - step[i];
    const double fm = f(p);
    p[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
  }

  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      p[i] = x[i] + step[i];
      p[j] = x[j] + step[j];
      const double fpp = f(p);
      p[j] = x[j] - step[j];
      const double fpm = f(p);
      p[i] = x[i] - step[i];
      const double fmm = f(p);
      p[j] = x[j] + step[j];
      const double fmp = f(p);
      p[i] = x[i];
      p[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

}  // namespace calib::num
