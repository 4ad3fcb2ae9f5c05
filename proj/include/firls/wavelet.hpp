#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "firls/core.hpp"

namespace firls {

enum class WaveletKind { identity, haar, db4 };

inline const char* to_string(WaveletKind kind) {
  switch (kind) {
    case WaveletKind::identity: return "identity";
    case WaveletKind::haar: return "haar";
    case WaveletKind::db4: return "db4";
  }
  return "?";
}

// Orthonormal transform Phi over a 1D signal or a column-major 2D image.
//
// The wavelet kinds are periodized orthonormal DWTs in the usual Mallat
// layout: after L levels the coarse approximation occupies the leading
// (height / 2^L) x (width / 2^L) block, and each finer level's detail bands
// surround it. forward() is Phi, inverse() is Phi^T = Phi^{-1}.
template <typename Scalar>
class OrthogonalTransform {
 public:
  static OrthogonalTransform identity(Index size) {
    detail::require(size > 0, "transform size must be positive");
    return OrthogonalTransform(WaveletKind::identity, size, 1, 0);
  }

  static OrthogonalTransform wavelet_1d(WaveletKind kind, Index length, int levels) {
    return wavelet_2d(kind, length, 1, levels);
  }

  static OrthogonalTransform wavelet_2d(WaveletKind kind, Index height, Index width, int levels) {
    detail::require(height > 0 && width > 0, "transform geometry must be positive");
    detail::require(levels >= 0, "decomposition levels must be non-negative");
    if (kind == WaveletKind::identity) return OrthogonalTransform(kind, height, width, 0);
    detail::require(is_pow2(height) && is_pow2(width),
                    "wavelet transform needs power-of-two dimensions");
    const Index limit = width == 1 ? height : std::min(height, width);
    detail::require((Index{1} << levels) <= limit, "too many decomposition levels for the geometry");
    return OrthogonalTransform(kind, height, width, levels);
  }

  /// Deepest decomposition allowed for the geometry.
  static int max_levels(Index height, Index width = 1) {
    Index limit = width == 1 ? height : std::min(height, width);
    int levels = 0;
    while (limit > 1 && limit % 2 == 0) {
      limit /= 2;
      ++levels;
    }
    return levels;
  }

  WaveletKind kind() const { return kind_; }
  Index size() const { return height_ * width_; }
  Index height() const { return height_; }
  Index width() const { return width_; }
  int levels() const { return levels_; }

  Vector<Scalar> forward(const Vector<Scalar>& x) const {
    detail::require_size(x.size(), size(), "transform forward");
    Vector<Scalar> c = x;
    if (kind_ == WaveletKind::identity) return c;
    Buffers buf;
    Index h = height_;
    Index w = width_;
    for (int level = 0; level < levels_; ++level) {
      for (Index col = 0; col < w; ++col) analyze(c, col * height_, 1, h, buf);
      if (width_ > 1) {
        for (Index row = 0; row < h; ++row) analyze(c, row, height_, w, buf);
      }
      h /= 2;
      if (width_ > 1) w /= 2;
    }
    return c;
  }

  Vector<Scalar> inverse(const Vector<Scalar>& c) const {
    detail::require_size(c.size(), size(), "transform inverse");
    Vector<Scalar> x = c;
    if (kind_ == WaveletKind::identity) return x;
    Buffers buf;
    for (int level = levels_ - 1; level >= 0; --level) {
      const Index h = height_ >> level;
      const Index w = width_ > 1 ? (width_ >> level) : 1;
      if (width_ > 1) {
        for (Index row = 0; row < h; ++row) synthesize(x, row, height_, w, buf);
      }
      for (Index col = 0; col < w; ++col) synthesize(x, col * height_, 1, h, buf);
    }
    return x;
  }

 private:
  OrthogonalTransform(WaveletKind kind, Index height, Index width, int levels)
      : kind_(kind), height_(height), width_(width), levels_(levels) {
    if (kind == WaveletKind::haar) {
      const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
      lowpass_ = {s, s};
    } else if (kind == WaveletKind::db4) {
      const Scalar r3 = std::sqrt(Scalar(3));
      const Scalar norm = Scalar(4) * std::sqrt(Scalar(2));
      lowpass_ = {(1 + r3) / norm, (3 + r3) / norm, (3 - r3) / norm, (1 - r3) / norm};
    }
    const std::size_t taps = lowpass_.size();
    highpass_.resize(taps);
    for (std::size_t m = 0; m < taps; ++m) {
      const Scalar sign = (m % 2 == 0) ? Scalar(1) : Scalar(-1);
      highpass_[m] = sign * lowpass_[taps - 1 - m];
    }
  }

  struct Buffers {
    std::vector<Scalar> in;
    std::vector<Scalar> out;
  };

  static bool is_pow2(Index v) { return v > 0 && (v & (v - 1)) == 0; }

  // One periodized analysis step on a strided line of even length.
  void analyze(Vector<Scalar>& data, Index start, Index stride, Index length, Buffers& buf) const {
    if (length < 2) return;
    const Index half = length / 2;
    buf.in.resize(static_cast<std::size_t>(length));
    buf.out.assign(static_cast<std::size_t>(length), Scalar(0));
    for (Index i = 0; i < length; ++i) buf.in[i] = data[start + i * stride];
    const Index taps = static_cast<Index>(lowpass_.size());
    for (Index k = 0; k < half; ++k) {
      Scalar approx(0);
      Scalar detail(0);
      for (Index m = 0; m < taps; ++m) {
        const Scalar v = buf.in[(2 * k + m) % length];
        approx += lowpass_[m] * v;
        detail += highpass_[m] * v;
      }
      buf.out[k] = approx;
      buf.out[half + k] = detail;
    }
    for (Index i = 0; i < length; ++i) data[start + i * stride] = buf.out[i];
  }

  // Transpose of analyze().
  void synthesize(Vector<Scalar>& data, Index start, Index stride, Index length, Buffers& buf) const {
    if (length < 2) return;
    const Index half = length / 2;
    buf.in.resize(static_cast<std::size_t>(length));
    buf.out.assign(static_cast<std::size_t>(length), Scalar(0));
    for (Index i = 0; i < length; ++i) buf.in[i] = data[start + i * stride];
    const Index taps = static_cast<Index>(lowpass_.size());
    for (Index k = 0; k < half; ++k) {
      const Scalar approx = buf.in[k];
      const Scalar detail = buf.in[half + k];
      for (Index m = 0; m < taps; ++m) {
        buf.out[(2 * k + m) % length] += lowpass_[m] * approx + highpass_[m] * detail;
      }
    }
    for (Index i = 0; i < length; ++i) data[start + i * stride] = buf.out[i];
  }

  WaveletKind kind_;
  Index height_;
  Index width_;
  int levels_;
  std::vector<Scalar> lowpass_;
  std::vector<Scalar> highpass_;
};

template <typename Scalar>
Vector<Scalar> transform_forward(const OrthogonalTransform<Scalar>& phi, const Vector<Scalar>& x) {
  return phi.forward(x);
}

template <typename Scalar>
Vector<Scalar> transform_inverse(const OrthogonalTransform<Scalar>& phi, const Vector<Scalar>& c) {
  return phi.inverse(c);
}

}  // namespace firls
