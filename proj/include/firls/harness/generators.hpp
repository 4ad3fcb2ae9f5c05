#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "firls/core.hpp"

namespace firls::harness {

/// K-sparse vector: uniformly chosen support, standard normal values.
Vector<double> gen_sparse_signal(Index n, Index k, std::uint64_t seed);

/// `channels` stacked K-sparse vectors sharing one support.
Vector<double> gen_joint_sparse_signal(Index n, Index k, Index channels, std::uint64_t seed);

struct Ellipse {
  double intensity;
  double semi_x;
  double semi_y;
  double center_x;
  double center_y;
  double angle_deg;
};

/// The ten-ellipse modified Shepp-Logan table (also shipped as data/shepp_logan_ellipses.csv).
const std::array<Ellipse, 10>& shepp_logan_ellipses();

/// n x n phantom, column-major, intensities in [0, 1].
Vector<double> gen_shepp_logan(Index n);

/// Variable-density k-space mask for an n x n image.
///
/// Draws exactly round(ratio * n^2) distinct column-major k-space indices
/// without replacement, with probability proportional to
/// (1 + radius / sigma)^-2 for sigma = n / 8; DC is always included.
std::vector<Index> gen_fourier_mask(Index n, double ratio, std::uint64_t seed);

/// The 1D analogue of gen_fourier_mask for a length-n signal.
std::vector<Index> gen_fourier_mask_1d(Index n, double ratio, std::uint64_t seed);

/// Uniform random subset of [0, n) of size m, sorted.
std::vector<Index> gen_random_subset(Index n, Index m, std::uint64_t seed);

/// Centered frequency radius of a column-major k-space index.
double frequency_radius(Index index, Index height, Index width);

}  // namespace firls::harness
