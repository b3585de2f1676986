#pragma once

#include <functional>
#include <vector>

#include "calib/numerics/matrix.hpp"

namespace calib::num {

// Central-difference Hessian of f at x. Step along coordinate i is
// rel_step * max(|x_i|, floor). Accuracy is O(h^2) truncation; with the
// defaults, relative error around 1e-6 for the smooth log-likelihoods this
// library differentiates.
Matrix numeric_hessian(const std::function<double(const std::vector<double>&)>& f,
                       const std::vector<double>& x, double rel_step = 1e-3,
                       double floor = 0.01);

}  // namespace calib::num
