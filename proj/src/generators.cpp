#include "firls/harness/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

namespace firls::harness {

namespace {

std::vector<Index> choose_support(Index n, Index k, std::mt19937_64& rng) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // Partial Fisher-Yates; std::shuffle's algorithm is unspecified.
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

// Efraimidis-Spirakis weighted sampling without replacement: keep the m
// largest keys log(u) / w.
std::vector<Index> weighted_sample(const std::vector<double>& weights, Index m, Index forced,
                                   std::mt19937_64& rng) {
  const Index n = static_cast<Index>(weights.size());
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<std::pair<double, Index>> keys;
  keys.reserve(weights.size());
  for (Index i = 0; i < n; ++i) {
    double u = uniform(rng);
    while (u <= 0.0) u = uniform(rng);
    const double key = i == forced ? 0.0 : std::log(u) / weights[static_cast<std::size_t>(i)];
    keys.emplace_back(key, i);
  }
  std::partial_sort(keys.begin(), keys.begin() + m, keys.end(),
                    [](const auto& l, const auto& r) { return l.first > r.first || (l.first == r.first && l.second < r.second); });
  std::vector<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) chosen.push_back(keys[static_cast<std::size_t>(i)].second);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Index sample_count(Index total, double ratio) {
  detail::require(ratio > 0.0 && ratio <= 1.0, "sampling ratio must lie in (0, 1]");
  const auto m = static_cast<Index>(std::llround(ratio * static_cast<double>(total)));
  return std::clamp<Index>(m, 1, total);
}

}  // namespace

Vector<double> gen_sparse_signal(Index n, Index k, std::uint64_t seed) {
  detail::require(n > 0, "signal length must be positive");
  detail::require(k >= 0 && k <= n, "sparsity K must lie in [0, N]");
  std::mt19937_64 rng(seed);
  const auto support = choose_support(n, k, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<double> x = Vector<double>::Zero(n);
  for (Index j : support) {
    double v = 0.0;
    while (v == 0.0) v = normal(rng);
    x[j] = v;
  }
  return x;
}

Vector<double> gen_joint_sparse_signal(Index n, Index k, Index channels, std::uint64_t seed) {
  detail::require(channels > 0, "channel count must be positive");
  detail::require(n > 0 && k >= 0 && k <= n, "sparsity K must lie in [0, N]");
  std::mt19937_64 rng(seed);
  const auto support = choose_support(n, k, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<double> x = Vector<double>::Zero(n * channels);
  for (Index c = 0; c < channels; ++c) {
    for (Index j : support) {
      double v = 0.0;
      while (v == 0.0) v = normal(rng);
      x[c * n + j] = v;
    }
  }
  return x;
}

const std::array<Ellipse, 10>& shepp_logan_ellipses() {
  static const std::array<Ellipse, 10> table{{
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
      {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
      {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
      {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  }};
  return table;
}

Vector<double> gen_shepp_logan(Index n) {
  detail::require(n >= 16, "phantom side must be at least 16");
  constexpr double kPi = 3.14159265358979323846;
  Vector<double> img = Vector<double>::Zero(n * n);
  for (Index c = 0; c < n; ++c) {
    const double x = -1.0 + (2.0 * static_cast<double>(c) + 1.0) / static_cast<double>(n);
    for (Index r = 0; r < n; ++r) {
      const double y = 1.0 - (2.0 * static_cast<double>(r) + 1.0) / static_cast<double>(n);
      double value = 0.0;
      for (const auto& e : shepp_logan_ellipses()) {
        const double phi = e.angle_deg * kPi / 180.0;
        const double dx = x - e.center_x;
        const double dy = y - e.center_y;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double v = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.semi_x * e.semi_x) + (v * v) / (e.semi_y * e.semi_y) <= 1.0) value += e.intensity;
      }
      // Snap away summation round-off so flat regions are exactly flat.
      value = std::round(value * 1e6) / 1e6;
      img[r + c * n] = std::clamp(value, 0.0, 1.0);
    }
  }
  return img;
}

double frequency_radius(Index index, Index height, Index width) {
  const Index r = index % height;
  const Index c = index / height;
  const double fr = static_cast<double>(r < (height + 1) / 2 ? r : r - height);
  const double fc = static_cast<double>(c < (width + 1) / 2 ? c : c - width);
  return std::sqrt(fr * fr + fc * fc);
}

namespace {

std::vector<Index> variable_density_mask(Index height, Index width, double ratio, std::uint64_t seed) {
  const Index total = height * width;
  const Index m = sample_count(total, ratio);
  if (m == total) {
    std::vector<Index> all(static_cast<std::size_t>(total));
    std::iota(all.begin(), all.end(), Index{0});
    return all;
  }
  const double sigma = static_cast<double>(std::max(height, width)) / 8.0;
  std::vector<double> weights(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) {
    const double t = 1.0 + frequency_radius(i, height, width) / sigma;
    weights[static_cast<std::size_t>(i)] = 1.0 / (t * t);
  }
  std::mt19937_64 rng(seed);
  return weighted_sample(weights, m, 0, rng);
}

}  // namespace

std::vector<Index> gen_fourier_mask(Index n, double ratio, std::uint64_t seed) {
  detail::require(n > 0, "mask side must be positive");
  return variable_density_mask(n, n, ratio, seed);
}

std::vector<Index> gen_fourier_mask_1d(Index n, double ratio, std::uint64_t seed) {
  detail::require(n > 0, "mask length must be positive");
  return variable_density_mask(n, 1, ratio, seed);
}

std::vector<Index> gen_random_subset(Index n, Index m, std::uint64_t seed) {
  detail::require(m > 0 && m <= n, "subset size must lie in [1, N]");
  std::mt19937_64 rng(seed);
  return choose_support(n, m, rng);
}

}  // namespace firls::harness
