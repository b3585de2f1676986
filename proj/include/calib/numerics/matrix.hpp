#pragma once

#include <array>
#include <cstddef>

namespace calib::num {

// Dense square matrix, fixed capacity 5x5: large enough for every
// information matrix in this library, small enough to live on the stack.
class Matrix {
 public:
  static constexpr std::size_t kMaxDim = 5;

  explicit Matrix(std::size_t n);

  static Matrix identity(std::size_t n);

  std::size_t dim() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

// Inverse of a symmetric matrix by LU decomposition with partial pivoting.
// The 1-norm condition number (computed from the explicit inverse) must not
// exceed `condition_guard`. The returned matrix is symmetrized, so symmetric
// input yields exactly symmetric output.
//
// Throws Error if the input is not square-symmetric to 1e-9 relative;
// SingularInformation on a vanishing pivot or a condition estimate over
// the guard.
Matrix invert(const Matrix& a, double condition_guard = 1e12);

}  // namespace calib::num
