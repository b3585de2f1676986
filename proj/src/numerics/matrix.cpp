#include "calib/numerics/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "calib/errors.hpp"

namespace calib::num {

Matrix::Matrix(std::size_t n) : n_(n) {
  if (n == 0 || n > kMaxDim) throw Error("matrix dimension out of range");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {

double one_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) col += std::abs(a(i, j));
    if (col > best) best = col;
  }
  return best;
}

}  // namespace

Matrix invert(const Matrix& a, double condition_guard) {
  const std::size_t n = a.dim();

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      scale = std::max(scale, std::abs(a(i, j)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-9 * scale)
        throw Error("invert requires a symmetric matrix");

  // LU with partial pivoting, factor kept in-place.
  Matrix lu = a;
  std::size_t perm[Matrix::kMaxDim];
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(col, j), lu(piv, j));
      std::swap(perm[col], perm[piv]);
    }
    const double pivot = lu(col, col);
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw SingularInformation("information matrix is singular");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / pivot;
      lu(r, col) = f;
      for (std::size_t j = col + 1; j < n; ++j) lu(r, j) -= f * lu(col, j);
    }
  }

  // Solve LU x = e_perm(col) for each unit vector.
  Matrix inv(n);
  for (std::size_t col = 0; col < n; ++col) {
    double x[Matrix::kMaxDim] = {};
    for (std::size_t i = 0; i < n; ++i) x[i] = perm[i] == col ? 1.0 : 0.0;
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
      x[i] /= lu(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
  }

  const double cond = one_norm(a) * one_norm(inv);
  if (!std::isfinite(cond) || cond > condition_guard)
    throw SingularInformation("information matrix condition estimate " +
                              std::to_string(cond) + " exceeds guard");

  // Symmetric input, symmetric inverse: average out LU rounding asymmetry.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = s;
      inv(j, i) = s;
    }
  return inv;
}

}  // namespace calib::num
