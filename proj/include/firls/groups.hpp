#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "firls/core.hpp"
#include "firls/wavelet.hpp"

namespace firls {

// Group configuration G in index form.
//
// G is the binary N' x N matrix whose rows are unit vectors e_j, one per
// membership (j in g_i), stacked group by group. It is never materialized:
// (G z)_{g_i} is just z restricted to the indices of group i, and G^T W G is
// diagonal with entry j equal to the summed weight of the groups holding j.
class GroupConfig {
 public:
  GroupConfig(Index dim, std::vector<std::vector<Index>> groups)
      : dim_(dim), groups_(std::move(groups)) {
    detail::require(dim_ > 0, "group configuration needs a positive dimension");
    detail::require(!groups_.empty(), "group configuration needs at least one group");
    for (const auto& g : groups_) {
      detail::require(!g.empty(), "groups must be non-empty");
      for (Index j : g) {
        if (j < 0 || j >= dim_) {
          throw InvalidInput("group index " + std::to_string(j) + " outside [0, " +
                             std::to_string(dim_) + ")");
        }
      }
    }
  }

  /// Standard sparsity: every coefficient is its own group.
  static GroupConfig singletons(Index dim) {
    std::vector<std::vector<Index>> groups(static_cast<std::size_t>(dim));
    for (Index j = 0; j < dim; ++j) groups[static_cast<std::size_t>(j)] = {j};
    return GroupConfig(dim, std::move(groups));
  }

  /// Non-overlapping contiguous blocks of `size` coefficients.
  static GroupConfig blocks(Index dim, Index size) {
    detail::require(size > 0 && dim % size == 0, "block size must divide the dimension");
    std::vector<std::vector<Index>> groups;
    for (Index start = 0; start < dim; start += size) {
      std::vector<Index> g(static_cast<std::size_t>(size));
      for (Index k = 0; k < size; ++k) g[static_cast<std::size_t>(k)] = start + k;
      groups.push_back(std::move(g));
    }
    return GroupConfig(dim, std::move(groups));
  }

  /// Overlapping windows of `size` coefficients advanced by `stride`.
  static GroupConfig sliding(Index dim, Index size, Index stride) {
    detail::require(size > 0 && stride > 0 && size <= dim, "invalid sliding window");
    std::vector<std::vector<Index>> groups;
    for (Index start = 0; start + size <= dim; start += stride) {
      std::vector<Index> g(static_cast<std::size_t>(size));
      for (Index k = 0; k < size; ++k) g[static_cast<std::size_t>(k)] = start + k;
      groups.push_back(std::move(g));
    }
    return GroupConfig(dim, std::move(groups));
  }

  /// Chained pairs [0,1], [1,2], ..., [N-2, N-1].
  static GroupConfig chained_pairs(Index dim) { return sliding(dim, 2, 1); }

  /// Joint sparsity over `channels` stacked vectors of length `dim`:
  /// group j collects coefficient j of every channel.
  static GroupConfig joint(Index dim, Index channels) {
    detail::require(dim > 0 && channels > 0, "joint groups need positive sizes");
    std::vector<std::vector<Index>> groups(static_cast<std::size_t>(dim));
    for (Index j = 0; j < dim; ++j) {
      auto& g = groups[static_cast<std::size_t>(j)];
      for (Index c = 0; c < channels; ++c) g.push_back(c * dim + j);
    }
    return GroupConfig(dim * channels, std::move(groups));
  }

  /// Parent-child pairs over the wavelet tree of `phi`.
  ///
  /// Every detail coefficient below the coarsest level forms a group with
  /// its parent at the next coarser level, so parents are shared between
  /// overlapping groups. Approximation coefficients belong to no group.
  template <typename Scalar>
  static GroupConfig tree(const OrthogonalTransform<Scalar>& phi) {
    const Index height = phi.height();
    const Index width = phi.width();
    const int levels = phi.levels();
    detail::require(levels >= 2, "tree groups need at least two decomposition levels");
    const bool two_d = width > 1;
    auto in_block = [&](Index r, Index c, int k) {
      return r < (height >> k) && (!two_d || c < (width >> k));
    };
    std::vector<std::vector<Index>> groups;
    for (Index c = 0; c < width; ++c) {
      for (Index r = 0; r < height; ++r) {
        if (in_block(r, c, levels)) continue;  // approximation band
        int level = 1;
        while (in_block(r, c, level)) ++level;
        if (level >= levels) continue;  // coarsest details are roots
        const Index pr = r / 2;
        const Index pc = two_d ? c / 2 : 0;
        groups.push_back({r + c * height, pr + pc * height});
      }
    }
    return GroupConfig(height * width, std::move(groups));
  }

  Index dim() const { return dim_; }
  Index group_count() const { return static_cast<Index>(groups_.size()); }
  const std::vector<std::vector<Index>>& groups() const { return groups_; }
  const std::vector<Index>& group(Index i) const { return groups_[static_cast<std::size_t>(i)]; }

  /// N' = sum of group sizes.
  Index row_count() const {
    Index rows = 0;
    for (const auto& g : groups_) rows += static_cast<Index>(g.size());
    return rows;
  }

  /// diag(G^T G): how many groups contain each coefficient.
  Eigen::VectorXi coverage() const {
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(dim_);
    for (const auto& g : groups_) {
      for (Index j : g) ++counts[j];
    }
    return counts;
  }

  bool overlapping() const { return (coverage().array() > 1).any(); }

 private:
  Index dim_;
  std::vector<std::vector<Index>> groups_;
};

/// (||z_{g_1}||_2, ..., ||z_{g_s}||_2).
template <typename Scalar>
Vector<Scalar> group_norms(const GroupConfig& groups, const Vector<Scalar>& z) {
  detail::require_size(z.size(), groups.dim(), "group norms");
  Vector<Scalar> norms(groups.group_count());
  for (Index i = 0; i < groups.group_count(); ++i) {
    Scalar sq(0);
    for (Index j : groups.group(i)) sq += z[j] * z[j];
    norms[i] = std::sqrt(sq);
  }
  return norms;
}

/// ||G z||_{2,1}.
template <typename Scalar>
Scalar group_l21(const GroupConfig& groups, const Vector<Scalar>& z) {
  return group_norms(groups, z).sum();
}

/// Diagonal of G^T W G for group weights w (one per group).
template <typename Scalar>
Vector<Scalar> gtwg_diagonal(const GroupConfig& groups, const Vector<Scalar>& w) {
  detail::require_size(w.size(), groups.group_count(), "group weights");
  Vector<Scalar> d = Vector<Scalar>::Zero(groups.dim());
  for (Index i = 0; i < groups.group_count(); ++i) {
    if (!(w[i] > Scalar(0)) || !std::isfinite(static_cast<double>(w[i]))) {
      throw InvalidInput("group weights must be positive and finite");
    }
    for (Index j : groups.group(i)) d[j] += w[i];
  }
  return d;
}

}  // namespace firls
