#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "firls/core.hpp"
#include "firls/groups.hpp"
#include "firls/measurement.hpp"
#include "firls/pcg.hpp"
#include "firls/solve_common.hpp"
#include "firls/wavelet.hpp"

namespace firls {

// min_x 1/2 ||A x - b||^2 + lambda ||G Phi x||_{2,1}
//
// With channels > 1 the unknown stacks `channels` signals of length N; A and
// Phi act on each block independently and G spans the stacked coefficients,
// which is how joint sparsity across channels is expressed.
template <typename Scalar>
struct OgProblem {
  std::shared_ptr<const MeasurementOperator<Scalar>> op;
  ComplexVector<Scalar> b;
  OrthogonalTransform<Scalar> phi;
  GroupConfig groups;
  Scalar lambda;
  Scalar epsilon = Scalar(1e-10);
  Index channels = 1;

  Index size() const { return channels * op->cols(); }

  void validate() const {
    detail::require(op != nullptr, "problem needs a measurement operator");
    detail::require(channels >= 1, "channel count must be positive");
    detail::require_size(phi.size(), op->cols(), "transform dimension");
    detail::require_size(groups.dim(), size(), "group configuration dimension");
    detail::require_size(b.size(), channels * op->rows(), "measurement vector");
    detail::require(lambda > Scalar(0), "lambda must be positive");
    detail::require(epsilon > Scalar(0), "epsilon must be positive");
  }
};

/// Group weights w_i and the diagonal d = diag(G^T W G).
template <typename Scalar>
struct OgWeights {
  Vector<Scalar> group;
  Vector<Scalar> diagonal;
};

namespace detail {

template <typename Scalar, typename Fn>
Vector<Scalar> per_channel(Index channels, Index block, const Vector<Scalar>& x, Fn&& fn) {
  require_size(x.size(), channels * block, "stacked vector");
  Vector<Scalar> out(x.size());
  for (Index c = 0; c < channels; ++c) {
    const Vector<Scalar> part = x.segment(c * block, block);
    out.segment(c * block, block) = fn(part);
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
ComplexVector<Scalar> og_measure(const OgProblem<Scalar>& p, const Vector<Scalar>& x) {
  const Index n = p.op->cols();
  const Index m = p.op->rows();
  detail::require_size(x.size(), p.size(), "og measure");
  ComplexVector<Scalar> y(p.channels * m);
  for (Index c = 0; c < p.channels; ++c) {
    y.segment(c * m, m) = p.op->forward(x.segment(c * n, n));
  }
  return y;
}

template <typename Scalar>
Vector<Scalar> og_adjoint(const OgProblem<Scalar>& p, const ComplexVector<Scalar>& y) {
  const Index n = p.op->cols();
  const Index m = p.op->rows();
  detail::require_size(y.size(), p.channels * m, "og adjoint");
  Vector<Scalar> x(p.size());
  for (Index c = 0; c < p.channels; ++c) {
    x.segment(c * n, n) = p.op->adjoint(y.segment(c * m, m));
  }
  return x;
}

/// Phi x on every channel.
template <typename Scalar>
Vector<Scalar> og_analysis(const OgProblem<Scalar>& p, const Vector<Scalar>& x) {
  return detail::per_channel(p.channels, p.phi.size(), x,
                             [&](const Vector<Scalar>& v) { return p.phi.forward(v); });
}

template <typename Scalar>
Scalar og_objective(const OgProblem<Scalar>& p, const Vector<Scalar>& x) {
  const Scalar fidelity = Scalar(0.5) * (og_measure(p, x) - p.b).squaredNorm();
  return fidelity + p.lambda * group_l21(p.groups, og_analysis(p, x));
}

/// w_i = (||z_{g_i}||^2 + eps)^{-1/2}, plus diag(G^T W G).
template <typename Scalar>
OgWeights<Scalar> group_weights(const GroupConfig& groups, const Vector<Scalar>& z, Scalar epsilon) {
  const Vector<Scalar> norms = group_norms(groups, z);
  OgWeights<Scalar> w;
  w.group = (norms.array().square() + epsilon).rsqrt().matrix();
  w.diagonal = gtwg_diagonal(groups, w.group);
  return w;
}

template <typename Scalar>
OgWeights<Scalar> og_update_weights(const OgProblem<Scalar>& p, const Vector<Scalar>& x) {
  return group_weights(p.groups, og_analysis(p, x), p.epsilon);
}

/// Majorizer Q(x, W) = 1/2||Ax-b||^2 + lambda/2 x^T Phi^T G^T W G Phi x + lambda/2 sum 1/w_i.
template <typename Scalar>
Scalar og_surrogate(const OgProblem<Scalar>& p, const Vector<Scalar>& x, const OgWeights<Scalar>& w) {
  const Scalar fidelity = Scalar(0.5) * (og_measure(p, x) - p.b).squaredNorm();
  const Vector<Scalar> z = og_analysis(p, x);
  const Scalar quadratic = (w.diagonal.array() * z.array().square()).sum();
  return fidelity + Scalar(0.5) * p.lambda * (quadratic + w.group.cwiseInverse().sum());
}

/// (A^T A + lambda Phi^T diag(d) Phi) x, matrix-free.
template <typename Scalar>
Vector<Scalar> og_system_apply(const OgProblem<Scalar>& p, const Vector<Scalar>& d, const Vector<Scalar>& x) {
  detail::require_size(d.size(), p.size(), "og system diagonal");
  const Index n = p.op->cols();
  Vector<Scalar> out(p.size());
  for (Index c = 0; c < p.channels; ++c) {
    const Vector<Scalar> part = x.segment(c * n, n);
    const Vector<Scalar> weighted = d.segment(c * n, n).cwiseProduct(p.phi.forward(part));
    out.segment(c * n, n) = p.op->normal(part) + p.lambda * p.phi.inverse(weighted);
  }
  return out;
}

/// P x = Phi^T (abar I + lambda diag(d)) Phi x, blockwise over channels.
template <typename Scalar>
Vector<Scalar> og_precond_apply(Scalar abar, Scalar lambda, const Vector<Scalar>& d,
                                const OrthogonalTransform<Scalar>& phi, const Vector<Scalar>& x) {
  detail::require_size(d.size(), x.size(), "preconditioner diagonal");
  const Index n = phi.size();
  detail::require(x.size() % n == 0, "preconditioner input is not a whole number of channels");
  Vector<Scalar> out(x.size());
  for (Index c = 0; c < x.size() / n; ++c) {
    const Vector<Scalar> scale = (abar + lambda * d.segment(c * n, n).array()).matrix();
    out.segment(c * n, n) = phi.inverse(scale.cwiseProduct(phi.forward(x.segment(c * n, n))));
  }
  return out;
}

/// P^{-1} r = Phi^T (abar I + lambda diag(d))^{-1} Phi r, in linear time.
template <typename Scalar>
Vector<Scalar> og_precond_inverse_apply(Scalar abar, Scalar lambda, const Vector<Scalar>& d,
                                        const OrthogonalTransform<Scalar>& phi, const Vector<Scalar>& r) {
  detail::require_size(d.size(), r.size(), "preconditioner diagonal");
  const Index n = phi.size();
  detail::require(r.size() % n == 0, "preconditioner input is not a whole number of channels");
  Vector<Scalar> out(r.size());
  for (Index c = 0; c < r.size() / n; ++c) {
    const Vector<Scalar> scale = (abar + lambda * d.segment(c * n, n).array()).inverse().matrix();
    out.segment(c * n, n) = phi.inverse(scale.cwiseProduct(phi.forward(r.segment(c * n, n))));
  }
  return out;
}

// FIRLS for (overlapping) group sparsity.
//
// Each outer iteration recomputes the group weights at x^k and runs PCG on
// (A^T A + lambda Phi^T G^T W G Phi) x = A^T b, warm-started at x^k and
// preconditioned by Phi^T (abar I + lambda G^T W G)^{-1} Phi with
// abar = mean(diag(A^T A)).
template <typename Scalar>
SolveReport<Scalar> firls_og_solve(const OgProblem<Scalar>& p, const SolveOptions<Scalar>& opts = {}) {
  p.validate();
  detail::validate_options(opts, p.size());
  const Scalar abar = p.op->mean_gram_diagonal();
  detail::require(abar > Scalar(0), "mean of diag(A^T A) must be positive");
  const Vector<Scalar> atb = og_adjoint(p, p.b);
  Vector<Scalar> x = opts.x0 ? *opts.x0 : atb;

  auto objective = [&](const Vector<Scalar>& v) { return og_objective(p, v); };
  auto inner = [&](const Vector<Scalar>& current) {
    const OgWeights<Scalar> w = og_update_weights(p, current);
    return pcg_solve(
        [&](const Vector<Scalar>& v) { return og_system_apply(p, w.diagonal, v); },
        [&](const Vector<Scalar>& r) { return og_precond_inverse_apply(abar, p.lambda, w.diagonal, p.phi, r); },
        atb, current, opts.pcg);
  };
  return detail::run_reweighted(std::move(x), opts, objective, inner);
}

}  // namespace firls
