#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace calib {

// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input rejected before any estimation ran (CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Fewer first-stage points than the model needs (n >= 3, k >= 2).
class TooFewPoints : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// All first-stage x values identical: the slope is unidentifiable.
class DegenerateDesign : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A non-finite value (NaN or infinity) in the input data.
class NonFinite : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Confidence level or probability outside (0, 1).
class InvalidLevel : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Malformed input file; carries the 1-based row and column of the offence.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& msg, std::size_t row, std::size_t col)
      : ValidationError(msg + " (row " + std::to_string(row) + ", column " +
                        std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

// Estimation started but could not finish (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Fitted slope too close to zero to invert the calibration line.
class ZeroSlope : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Information matrix numerically singular or condition estimate over guard.
class SingularInformation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Iterative solver failed to reach the residual tolerance.
class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A variance that must be positive came out zero or negative.
class NonPositiveVariance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Every replication of a simulation cell failed to fit.
class AllReplicationsFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace calib
