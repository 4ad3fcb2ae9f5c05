#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "firls/core.hpp"

namespace firls {

enum class MeasurementKind { dense, gaussian, partial_fourier, selection };

inline const char* to_string(MeasurementKind kind) {
  switch (kind) {
    case MeasurementKind::dense: return "dense";
    case MeasurementKind::gaussian: return "gaussian";
    case MeasurementKind::partial_fourier: return "fourier";
    case MeasurementKind::selection: return "select";
  }
  return "?";
}

// Linear measurement map A : R^N -> C^M.
//
// Measurements are always complex so that every kind shares one vector type;
// the real kinds leave the imaginary part at zero. The adjoint is taken with
// respect to the real inner product <u, v> = Re(v^H u) on C^M, which makes
// A^T y = Re(A^H y). For the partial Fourier kind this keeps A^T A real,
// symmetric and positive semidefinite on real images.
//
// Images are flattened column-major: pixel (r, c) lives at r + c * height.
// Fourier sample indices use the same layout in k-space, with the unitary
// (1/sqrt(N)) normalization so that diag(A^T A) = M / N exactly.
template <typename Scalar>
class MeasurementOperator {
 public:
  using Real = Scalar;
  using Complex = std::complex<Scalar>;

  static MeasurementOperator dense(Matrix<Scalar> a) {
    detail::require(a.rows() > 0 && a.cols() > 0, "dense operator needs a non-empty matrix");
    MeasurementOperator op(MeasurementKind::dense, a.rows(), a.cols());
    op.matrix_ = std::move(a);
    return op;
  }

  /// M x N matrix with i.i.d. N(0, 1/M) entries drawn from a seeded mt19937_64.
  static MeasurementOperator gaussian(Index rows, Index cols, std::uint64_t seed) {
    detail::require(rows > 0 && cols > 0, "gaussian operator needs positive dimensions");
    detail::require(rows <= cols, "gaussian projection must undersample (M <= N)");
    MeasurementOperator op(MeasurementKind::gaussian, rows, cols);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(rows)));
    op.matrix_.resize(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) op.matrix_(i, j) = static_cast<Scalar>(normal(rng));
    }
    return op;
  }

  /// Unitary 2D DFT of a height x width image restricted to `samples`.
  /// A 1D signal is the width == 1 case.
  static MeasurementOperator partial_fourier(Index height, Index width, std::vector<Index> samples) {
    detail::require(height > 0 && width > 0, "fourier operator needs positive geometry");
    MeasurementOperator op(MeasurementKind::partial_fourier, static_cast<Index>(samples.size()),
                           height * width);
    op.height_ = height;
    op.width_ = width;
    op.samples_ = std::move(samples);
    op.check_samples();
    return op;
  }

  /// Row selection R: picks the listed entries of x.
  static MeasurementOperator selection(Index cols, std::vector<Index> samples) {
    detail::require(cols > 0, "selection operator needs positive dimension");
    MeasurementOperator op(MeasurementKind::selection, static_cast<Index>(samples.size()), cols);
    op.samples_ = std::move(samples);
    op.check_samples();
    return op;
  }

  MeasurementKind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index height() const { return height_; }
  Index width() const { return width_; }
  const std::vector<Index>& samples() const { return samples_; }

  /// Explicit matrix of the dense and gaussian kinds.
  const Matrix<Scalar>& matrix() const {
    detail::require(has_matrix(), "operator has no explicit matrix");
    return matrix_;
  }
  bool has_matrix() const {
    return kind_ == MeasurementKind::dense || kind_ == MeasurementKind::gaussian;
  }

  ComplexVector<Scalar> forward(const Vector<Scalar>& x) const {
    detail::require_size(x.size(), cols_, "measurement forward");
    switch (kind_) {
      case MeasurementKind::dense:
      case MeasurementKind::gaussian:
        return (matrix_ * x).template cast<Complex>();
      case MeasurementKind::selection: {
        ComplexVector<Scalar> y(rows_);
        for (Index i = 0; i < rows_; ++i) y[i] = Complex(x[samples_[i]], Scalar(0));
        return y;
      }
      case MeasurementKind::partial_fourier: {
        ComplexVector<Scalar> k = x.template cast<Complex>();
        fft2(k, false);
        ComplexVector<Scalar> y(rows_);
        for (Index i = 0; i < rows_; ++i) y[i] = k[samples_[i]];
        return y;
      }
    }
    return {};
  }

  Vector<Scalar> adjoint(const ComplexVector<Scalar>& y) const {
    detail::require_size(y.size(), rows_, "measurement adjoint");
    switch (kind_) {
      case MeasurementKind::dense:
      case MeasurementKind::gaussian:
        return matrix_.transpose() * y.real();
      case MeasurementKind::selection: {
        Vector<Scalar> x = Vector<Scalar>::Zero(cols_);
        for (Index i = 0; i < rows_; ++i) x[samples_[i]] += y[i].real();
        return x;
      }
      case MeasurementKind::partial_fourier: {
        ComplexVector<Scalar> k = ComplexVector<Scalar>::Zero(cols_);
        for (Index i = 0; i < rows_; ++i) k[samples_[i]] += y[i];
        fft2(k, true);
        return k.real();
      }
    }
    return {};
  }

  /// A^T A x without forming complex intermediates for the real kinds.
  Vector<Scalar> normal(const Vector<Scalar>& x) const {
    detail::require_size(x.size(), cols_, "measurement normal");
    switch (kind_) {
      case MeasurementKind::dense:
      case MeasurementKind::gaussian: {
        const Vector<Scalar> ax = matrix_ * x;
        return matrix_.transpose() * ax;
      }
      case MeasurementKind::selection: {
        Vector<Scalar> out = Vector<Scalar>::Zero(cols_);
        for (Index i : samples_) out[i] += x[i];
        return out;
      }
      case MeasurementKind::partial_fourier:
        return adjoint(forward(x));
    }
    return {};
  }

  /// diag(A^T A).
  Vector<Scalar> gram_diagonal() const {
    switch (kind_) {
      case MeasurementKind::dense:
      case MeasurementKind::gaussian:
        return matrix_.colwise().squaredNorm().transpose();
      case MeasurementKind::selection: {
        Vector<Scalar> d = Vector<Scalar>::Zero(cols_);
        for (Index i : samples_) d[i] += Scalar(1);
        return d;
      }
      case MeasurementKind::partial_fourier:
        return Vector<Scalar>::Constant(cols_, Scalar(rows_) / Scalar(cols_));
    }
    return {};
  }

  /// trace(A^T A) / N.
  Scalar mean_gram_diagonal() const {
    switch (kind_) {
      case MeasurementKind::dense:
      case MeasurementKind::gaussian:
        return matrix_.squaredNorm() / Scalar(cols_);
      case MeasurementKind::selection:
      case MeasurementKind::partial_fourier:
        return Scalar(rows_) / Scalar(cols_);
    }
    return Scalar(0);
  }

 private:
  MeasurementOperator(MeasurementKind kind, Index rows, Index cols)
      : kind_(kind), rows_(rows), cols_(cols), height_(cols), width_(1) {}

  void check_samples() const {
    detail::require(!samples_.empty(), "sampling set is empty");
    detail::require(rows_ <= cols_, "more samples than unknowns");
    std::vector<Index> sorted = samples_;
    std::sort(sorted.begin(), sorted.end());
    detail::require(sorted.front() >= 0 && sorted.back() < cols_, "sample index out of range");
    detail::require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                    "sample indices must be distinct");
  }

  // In-place unitary 2D DFT (or its inverse) on a column-major height x width grid.
  void fft2(ComplexVector<Scalar>& data, bool inverse) const {
    Eigen::FFT<Scalar> fft;
    fft.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    std::vector<Complex> in;
    std::vector<Complex> out;
    auto transform = [&](Index start, Index stride, Index length) {
      if (length == 1) return;
      in.resize(static_cast<std::size_t>(length));
      for (Index i = 0; i < length; ++i) in[static_cast<std::size_t>(i)] = data[start + i * stride];
      if (inverse) {
        fft.inv(out, in);
      } else {
        fft.fwd(out, in);
      }
      for (Index i = 0; i < length; ++i) data[start + i * stride] = out[static_cast<std::size_t>(i)];
    };
    for (Index c = 0; c < width_; ++c) transform(c * height_, 1, height_);
    for (Index r = 0; r < height_; ++r) transform(r, height_, width_);
    data *= Scalar(1) / std::sqrt(Scalar(cols_));
  }

  MeasurementKind kind_;
  Index rows_;
  Index cols_;
  Index height_;
  Index width_;
  Matrix<Scalar> matrix_;
  std::vector<Index> samples_;
};

template <typename Scalar>
ComplexVector<Scalar> apply_forward(const MeasurementOperator<Scalar>& a, const Vector<Scalar>& x) {
  return a.forward(x);
}

template <typename Scalar>
Vector<Scalar> apply_adjoint(const MeasurementOperator<Scalar>& a, const ComplexVector<Scalar>& y) {
  return a.adjoint(y);
}

template <typename Scalar>
Scalar mean_gram_diagonal(const MeasurementOperator<Scalar>& a) {
  return a.mean_gram_diagonal();
}

/// Real inner product on C^M used by the adjoint convention.
template <typename Scalar>
Scalar real_dot(const ComplexVector<Scalar>& u, const ComplexVector<Scalar>& v) {
  return (u.real().dot(v.real()) + u.imag().dot(v.imag()));
}

}  // namespace firls
