#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "firls/core.hpp"

namespace firls {

enum class DiffDirection { vertical, horizontal };

// First-order difference operator on a column-major n x n image, N = n^2.
//
// Implements the banded N x N matrices literally: unit main diagonal and -1 on
// the sub-diagonal at offset 1 (vertical, D1) or offset n (horizontal, D2).
// The first `offset` rows therefore pass x through unchanged, and the D1
// sub-diagonal runs across column boundaries of the image.
template <typename Scalar>
class FiniteDifference {
 public:
  FiniteDifference(Index side, DiffDirection direction) : side_(side), direction_(direction) {
    detail::require(side > 0, "image side must be positive");
  }

  static FiniteDifference from_size(Index size, DiffDirection direction) {
    const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(size))));
    if (size <= 0 || side * side != size) {
      throw InvalidInput("finite difference needs a square image, got N = " + std::to_string(size));
    }
    return FiniteDifference(side, direction);
  }

  Index side() const { return side_; }
  Index size() const { return side_ * side_; }
  DiffDirection direction() const { return direction_; }
  Index offset() const { return direction_ == DiffDirection::vertical ? 1 : side_; }

  Vector<Scalar> apply(const Vector<Scalar>& x) const {
    detail::require_size(x.size(), size(), "finite difference");
    const Index n = size();
    const Index o = std::min(offset(), n);
    Vector<Scalar> out(n);
    out.head(o) = x.head(o);
    out.tail(n - o) = x.tail(n - o) - x.head(n - o);
    return out;
  }

  Vector<Scalar> adjoint(const Vector<Scalar>& g) const {
    detail::require_size(g.size(), size(), "finite difference adjoint");
    const Index n = size();
    const Index o = std::min(offset(), n);
    Vector<Scalar> out(n);
    out.head(n - o) = g.head(n - o) - g.tail(n - o);
    out.tail(o) = g.tail(o);
    return out;
  }

 private:
  Index side_;
  DiffDirection direction_;
};

template <typename Scalar>
Vector<Scalar> finite_diff_apply(const FiniteDifference<Scalar>& d, const Vector<Scalar>& x) {
  return d.apply(x);
}

template <typename Scalar>
Vector<Scalar> finite_diff_adjoint(const FiniteDifference<Scalar>& d, const Vector<Scalar>& g) {
  return d.adjoint(g);
}

}  // namespace firls
