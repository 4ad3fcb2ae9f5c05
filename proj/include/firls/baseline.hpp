#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "firls/core.hpp"
#include "firls/groups.hpp"

namespace firls {

/// Explicit M x N system used by the dense desk-scale solvers.
template <typename Scalar>
struct DenseProblem {
  Matrix<Scalar> a;
  Vector<Scalar> b;
  Scalar lambda = Scalar(0);
  /// Guard added to |x_i| in the FOCUSS weights.
  Scalar guard = Scalar(1e-12);
};

/// Largest N the dense baselines accept.
inline constexpr Index kDenseBaselineLimit = 2048;

template <typename Scalar>
struct FocussResult {
  Vector<Scalar> solution;
  int iterations = 0;
  bool converged = false;
  /// x^1, x^2, ... when requested.
  std::vector<Vector<Scalar>> iterates;
};

template <typename Scalar>
struct FocussOptions {
  int max_iterations = 200;
  /// Stop once ||x^{k+1} - x^k|| / ||x^k|| drops below this.
  Scalar tolerance = Scalar(1e-10);
  bool record_iterates = false;
};

// Classical IRLS (FOCUSS) for min ||x||_1 subject to A x = b.
//
// x^1 is the minimum-norm solution; then
//   x^{k+1} = W^{-1} A^T (A W^{-1} A^T)^{-1} b,  W^{-1} = diag(|x^k_i| + guard).
// Every iterate is feasible. Each step factors an M x M matrix, which is why
// the problem size is capped.
template <typename Scalar>
FocussResult<Scalar> irls_focuss_solve(const DenseProblem<Scalar>& p, const FocussOptions<Scalar>& opts = {}) {
  const Index m = p.a.rows();
  const Index n = p.a.cols();
  detail::require(m > 0 && n > 0, "empty system");
  detail::require(n <= kDenseBaselineLimit, "dense baseline refuses N > 2048");
  detail::require(m <= n, "FOCUSS needs M <= N");
  detail::require_size(p.b.size(), m, "measurement vector");

  FocussResult<Scalar> result;
  Vector<Scalar> inv_weight = Vector<Scalar>::Ones(n);
  Vector<Scalar> x;
  for (int k = 1; k <= opts.max_iterations; ++k) {
    const Matrix<Scalar> scaled = p.a * inv_weight.asDiagonal();
    const Matrix<Scalar> inner = scaled * p.a.transpose();
    Eigen::LDLT<Matrix<Scalar>> ldlt(inner);
    const Scalar pivot_floor = std::numeric_limits<Scalar>::epsilon() * inner.diagonal().cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().cwiseAbs().minCoeff() <= pivot_floor) {
      throw NumericalBreakdown("FOCUSS: A W^{-1} A^T is singular at iteration " + std::to_string(k));
    }
    Vector<Scalar> next = scaled.transpose() * ldlt.solve(p.b);
    if (!next.allFinite()) throw NumericalBreakdown("FOCUSS: non-finite iterate");
    result.iterations = k;
    if (opts.record_iterates) result.iterates.push_back(next);
    const bool first = x.size() == 0;
    const Scalar change = first ? std::numeric_limits<Scalar>::infinity()
                                : (next - x).norm() / std::max(x.norm(), std::numeric_limits<Scalar>::min());
    x = std::move(next);
    if (change < opts.tolerance) {
      result.converged = true;
      break;
    }
    inv_weight = (x.array().abs() + p.guard).matrix();
  }
  result.solution = std::move(x);
  return result;
}

/// Largest eigenvalue of A^T A by power iteration (deterministic start).
template <typename Scalar>
Scalar gram_spectral_norm(const Matrix<Scalar>& a, int iterations = 200) {
  Vector<Scalar> v = Vector<Scalar>::Ones(a.cols()).normalized();
  Scalar estimate(0);
  for (int i = 0; i < iterations; ++i) {
    Vector<Scalar> w = a.transpose() * (a * v);
    const Scalar norm = w.norm();
    if (norm == Scalar(0)) return Scalar(0);
    estimate = norm;
    v = w / norm;
  }
  return estimate;
}

template <typename Scalar>
struct ReferenceOptions {
  int iterations = 50000;
  /// FISTA with function-value restart when true, plain ISTA otherwise.
  bool accelerated = true;
  /// Early exit once ||x^{k+1} - x^k|| <= tolerance * max(1, ||x^k||).
  Scalar tolerance = Scalar(1e-14);
  /// Records F(x^k) per iteration when set.
  bool record_objective = false;
};

template <typename Scalar>
struct ReferenceResult {
  Vector<Scalar> solution;
  int iterations = 0;
  std::vector<Scalar> objective_trace;
};

namespace detail {

template <typename Scalar>
Scalar group_objective(const DenseProblem<Scalar>& p, const GroupConfig& groups, const Vector<Scalar>& x) {
  return Scalar(0.5) * (p.a * x - p.b).squaredNorm() + p.lambda * group_l21(groups, x);
}

template <typename Scalar>
Vector<Scalar> group_shrink(const GroupConfig& groups, const Vector<Scalar>& v, Scalar threshold) {
  Vector<Scalar> out = Vector<Scalar>::Zero(v.size());
  for (const auto& g : groups.groups()) {
    Scalar sq(0);
    for (Index j : g) sq += v[j] * v[j];
    const Scalar norm = std::sqrt(sq);
    if (norm <= threshold) continue;
    const Scalar scale = Scalar(1) - threshold / norm;
    for (Index j : g) out[j] = scale * v[j];
  }
  return out;
}

}  // namespace detail

// Proximal gradient reference for min 1/2||Ax-b||^2 + lambda sum ||x_{g_i}||
// with non-overlapping groups (singletons give the l1 problem). Step 1/L with
// L = ||A^T A||_2 from power iteration.
template <typename Scalar>
ReferenceResult<Scalar> prox_grad_reference_solve(const DenseProblem<Scalar>& p, const GroupConfig& groups,
                                                  const ReferenceOptions<Scalar>& opts = {}) {
  detail::require_size(groups.dim(), p.a.cols(), "group configuration dimension");
  detail::require_size(p.b.size(), p.a.rows(), "measurement vector");
  detail::require(!groups.overlapping(), "proximal reference needs non-overlapping groups");
  detail::require(p.lambda >= Scalar(0), "lambda must be non-negative");

  const Scalar lipschitz = gram_spectral_norm(p.a) * Scalar(1.0001);
  const Scalar step = lipschitz > Scalar(0) ? Scalar(1) / lipschitz : Scalar(1);
  const Matrix<Scalar> gram = p.a.transpose() * p.a;
  const Vector<Scalar> atb = p.a.transpose() * p.b;

  auto prox_step = [&](const Vector<Scalar>& y) {
    return detail::group_shrink(groups, Vector<Scalar>(y - step * (gram * y - atb)), step * p.lambda);
  };

  ReferenceResult<Scalar> result;
  Vector<Scalar> x = Vector<Scalar>::Zero(p.a.cols());
  Vector<Scalar> y = x;
  Scalar t(1);
  Scalar f_prev = detail::group_objective(p, groups, x);
  for (int k = 1; k <= opts.iterations; ++k) {
    Vector<Scalar> next = prox_step(opts.accelerated ? y : x);
    Scalar f = detail::group_objective(p, groups, next);
    if (opts.accelerated && f > f_prev) {
      // Restart momentum when the objective goes up.
      t = Scalar(1);
      next = prox_step(x);
      f = detail::group_objective(p, groups, next);
    }
    const Scalar change = (next - x).norm();
    const Scalar t_next = (Scalar(1) + std::sqrt(Scalar(1) + Scalar(4) * t * t)) / Scalar(2);
    y = next + ((t - Scalar(1)) / t_next) * (next - x);
    t = t_next;
    x = std::move(next);
    f_prev = f;
    result.iterations = k;
    if (opts.record_objective) result.objective_trace.push_back(f);
    if (change <= opts.tolerance * std::max(Scalar(1), x.norm())) break;
  }
  result.solution = std::move(x);
  return result;
}

// ADMM reference for min 1/2||Ax-b||^2 + lambda sum_i ||(Psi x)_{g_i}||
// where the groups partition the rows of a dense analysis matrix Psi.
//
// Covers the problems without a cheap proximal map: overlapping groups
// (Psi = G Phi with duplicated rows) and total variation (Psi = [D1; D2]).
template <typename Scalar>
ReferenceResult<Scalar> admm_analysis_reference_solve(const DenseProblem<Scalar>& p, const Matrix<Scalar>& psi,
                                                      const GroupConfig& row_groups,
                                                      const ReferenceOptions<Scalar>& opts = {}) {
  detail::require_size(psi.cols(), p.a.cols(), "analysis operator width");
  detail::require_size(row_groups.dim(), psi.rows(), "row group dimension");
  detail::require(!row_groups.overlapping(), "row groups must partition the analysis rows");

  const Matrix<Scalar> gram = p.a.transpose() * p.a;
  const Matrix<Scalar> psi_gram = psi.transpose() * psi;
  // Penalty balanced between the two quadratic terms.
  const Scalar rho = std::max(gram.diagonal().mean(), Scalar(1e-3)) /
                     std::max(psi_gram.diagonal().mean(), Scalar(1e-12));
  Eigen::LLT<Matrix<Scalar>> llt(gram + rho * psi_gram);
  detail::require(llt.info() == Eigen::Success, "A^T A + rho Psi^T Psi must be positive definite");
  const Vector<Scalar> atb = p.a.transpose() * p.b;

  auto objective = [&](const Vector<Scalar>& v) {
    return Scalar(0.5) * (p.a * v - p.b).squaredNorm() + p.lambda * group_l21(row_groups, Vector<Scalar>(psi * v));
  };

  ReferenceResult<Scalar> result;
  Vector<Scalar> x = llt.solve(atb);
  Vector<Scalar> z = psi * x;
  Vector<Scalar> u = Vector<Scalar>::Zero(psi.rows());
  for (int k = 1; k <= opts.iterations; ++k) {
    Vector<Scalar> next = llt.solve(Vector<Scalar>(atb + rho * psi.transpose() * (z - u)));
    const Vector<Scalar> psi_x = psi * next;
    const Vector<Scalar> z_next = detail::group_shrink(row_groups, Vector<Scalar>(psi_x + u), p.lambda / rho);
    u += psi_x - z_next;
    const Scalar change = (next - x).norm() + (z_next - z).norm();
    x = std::move(next);
    z = z_next;
    result.iterations = k;
    if (opts.record_objective) result.objective_trace.push_back(objective(x));
    if (change <= opts.tolerance * std::max(Scalar(1), x.norm())) break;
  }
  result.solution = std::move(x);
  return result;
}

/// Dense [D1; D2] for an n x n image, with pixel i of D1 paired to pixel i of D2.
template <typename Scalar>
Matrix<Scalar> dense_tv_analysis(Index side) {
  const Index n = side * side;
  Matrix<Scalar> psi = Matrix<Scalar>::Zero(2 * n, n);
  for (Index i = 0; i < n; ++i) {
    psi(i, i) = Scalar(1);
    if (i >= 1) psi(i, i - 1) = Scalar(-1);
    psi(n + i, i) = Scalar(1);
    if (i >= side) psi(n + i, i - side) = Scalar(-1);
  }
  return psi;
}

/// Row groups over [D1; D2]: isotropic pairs (i, N+i) or anisotropic singletons.
inline GroupConfig tv_row_groups(Index side, bool isotropic) {
  const Index n = side * side;
  if (!isotropic) return GroupConfig::singletons(2 * n);
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) groups[static_cast<std::size_t>(i)] = {i, n + i};
  return GroupConfig(2 * n, std::move(groups));
}

}  // namespace firls
