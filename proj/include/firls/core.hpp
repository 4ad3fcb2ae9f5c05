#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace firls {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch, out-of-range index, or otherwise malformed argument.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A solver produced a non-finite value. Derived types carry the partial state.
class NumericalBreakdown : public Error {
 public:
  using Error::Error;
};

class NotPositiveDiagonal : public Error {
 public:
  using Error::Error;
};

class SingularFactor : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined for the given input (e.g. zero-variance reference).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

inline void require_size(Index actual, Index expected, const char* what) {
  if (actual != expected) {
    throw InvalidInput(std::string(what) + ": expected length " + std::to_string(expected) +
                       ", got " + std::to_string(actual));
  }
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

}  // namespace detail

}  // namespace firls
