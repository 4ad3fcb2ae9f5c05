#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "firls/core.hpp"

namespace firls {

template <typename Scalar>
struct PcgConfig {
  int max_iterations = 30;
  Scalar relative_residual_tolerance = Scalar(1e-8);
  bool record_residual_trace = false;

  void validate() const {
    detail::require(max_iterations >= 1, "PCG needs at least one iteration");
    detail::require(relative_residual_tolerance > Scalar(0) && relative_residual_tolerance < Scalar(1),
                    "PCG tolerance must lie in (0, 1)");
  }
};

template <typename Scalar>
struct PcgResult {
  Vector<Scalar> solution;
  int iterations = 0;
  bool converged = false;
  /// ||S x_j - rhs|| / ||rhs|| for j = 0 (the start point) .. iterations.
  std::vector<Scalar> residual_trace;
};

/// Raised when PCG meets a non-finite value or a non-positive curvature p^T S p.
template <typename Scalar>
class PcgBreakdown : public NumericalBreakdown {
 public:
  PcgBreakdown(const std::string& what, Vector<Scalar> last_iterate, int iteration)
      : NumericalBreakdown(what), last_iterate_(std::move(last_iterate)), iteration_(iteration) {}

  const Vector<Scalar>& last_iterate() const { return last_iterate_; }
  int iteration() const { return iteration_; }

 private:
  Vector<Scalar> last_iterate_;
  int iteration_;
};

// Preconditioned conjugate gradient for S x = rhs.
//
// `apply_s` and `apply_pinv` are callables Vector -> Vector for S and the
// preconditioner inverse P^{-1}; both must be symmetric positive definite.
// Starting from `x`, every step minimizes the energy 1/2 x^T S x - rhs^T x
// over a growing Krylov space, so the energy never increases. Iteration
// stops once ||r|| <= tol * ||rhs|| or after max_iterations steps.
template <typename Scalar, typename ApplyS, typename ApplyPinv>
PcgResult<Scalar> pcg_solve(ApplyS&& apply_s, ApplyPinv&& apply_pinv, const Vector<Scalar>& rhs,
                            Vector<Scalar> x, const PcgConfig<Scalar>& cfg) {
  cfg.validate();
  detail::require_size(x.size(), rhs.size(), "PCG initial guess");

  PcgResult<Scalar> result;
  const Scalar rhs_norm = rhs.norm();
  if (rhs_norm == Scalar(0)) {
    result.solution = Vector<Scalar>::Zero(rhs.size());
    result.converged = true;
    if (cfg.record_residual_trace) result.residual_trace.push_back(Scalar(0));
    return result;
  }

  Vector<Scalar> r = rhs - apply_s(x);
  Scalar relative = r.norm() / rhs_norm;
  if (cfg.record_residual_trace) result.residual_trace.push_back(relative);
  if (relative <= cfg.relative_residual_tolerance) {
    result.solution = std::move(x);
    result.converged = true;
    return result;
  }

  Vector<Scalar> z = apply_pinv(r);
  Vector<Scalar> p = z;
  Scalar rz = r.dot(z);
  Vector<Scalar> q(x.size());

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    q = apply_s(p);
    const Scalar curvature = p.dot(q);
    if (!std::isfinite(static_cast<double>(curvature)) || !(curvature > Scalar(0))) {
      throw PcgBreakdown<Scalar>("PCG breakdown: curvature " + std::to_string(double(curvature)),
                                 std::move(x), it);
    }
    const Scalar alpha = rz / curvature;
    Vector<Scalar> next = x + alpha * p;
    if (!next.allFinite()) {
      throw PcgBreakdown<Scalar>("PCG breakdown: non-finite iterate", std::move(x), it);
    }
    x = std::move(next);
    r -= alpha * q;
    result.iterations = it;

    relative = r.norm() / rhs_norm;
    if (cfg.record_residual_trace) result.residual_trace.push_back(relative);
    if (relative <= cfg.relative_residual_tolerance) {
      result.converged = true;
      break;
    }

    z = apply_pinv(r);
    const Scalar rz_next = r.dot(z);
    if (!std::isfinite(static_cast<double>(rz_next))) {
      throw PcgBreakdown<Scalar>("PCG breakdown: non-finite preconditioned residual", std::move(x), it);
    }
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }

  result.solution = std::move(x);
  return result;
}

/// Unpreconditioned CG, i.e. P = I.
template <typename Scalar, typename ApplyS>
PcgResult<Scalar> cg_solve(ApplyS&& apply_s, const Vector<Scalar>& rhs, Vector<Scalar> x,
                           const PcgConfig<Scalar>& cfg) {
  return pcg_solve(std::forward<ApplyS>(apply_s), [](const Vector<Scalar>& r) { return r; }, rhs,
                   std::move(x), cfg);
}

}  // namespace firls
