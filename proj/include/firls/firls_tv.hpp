#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "firls/core.hpp"
#include "firls/finite_difference.hpp"
#include "firls/measurement.hpp"
#include "firls/pcg.hpp"
#include "firls/solve_common.hpp"

namespace firls {

enum class TvVariant { isotropic, anisotropic };

inline const char* to_string(TvVariant v) {
  return v == TvVariant::isotropic ? "isotropic" : "anisotropic";
}

// min_x 1/2 ||A x - b||^2 + lambda TV(x) on an n x n image.
//
// Isotropic TV sums sqrt((D1 x)_i^2 + (D2 x)_i^2) per pixel; anisotropic TV
// is ||D1 x||_1 + ||D2 x||_1.
template <typename Scalar>
struct TvProblem {
  std::shared_ptr<const MeasurementOperator<Scalar>> op;
  ComplexVector<Scalar> b;
  Index side;
  Scalar lambda;
  Scalar epsilon = Scalar(1e-10);
  TvVariant variant = TvVariant::isotropic;

  Index size() const { return side * side; }
  FiniteDifference<Scalar> vertical() const { return {side, DiffDirection::vertical}; }
  FiniteDifference<Scalar> horizontal() const { return {side, DiffDirection::horizontal}; }

  void validate() const {
    detail::require(op != nullptr, "problem needs a measurement operator");
    detail::require(side > 0, "image side must be positive");
    detail::require_size(op->cols(), size(), "measurement domain");
    detail::require_size(b.size(), op->rows(), "measurement vector");
    detail::require(lambda > Scalar(0), "lambda must be positive");
    detail::require(epsilon > Scalar(0), "epsilon must be positive");
  }
};

/// Per-pixel weights for D1 and D2. Both vectors coincide for isotropic TV.
template <typename Scalar>
struct TvWeights {
  Vector<Scalar> vertical;
  Vector<Scalar> horizontal;
};

template <typename Scalar>
Scalar tv_objective(const TvProblem<Scalar>& p, const Vector<Scalar>& x) {
  const Vector<Scalar> g1 = p.vertical().apply(x);
  const Vector<Scalar> g2 = p.horizontal().apply(x);
  const Scalar fidelity = Scalar(0.5) * (p.op->forward(x) - p.b).squaredNorm();
  Scalar penalty;
  if (p.variant == TvVariant::isotropic) {
    penalty = (g1.array().square() + g2.array().square()).sqrt().sum();
  } else {
    penalty = g1.template lpNorm<1>() + g2.template lpNorm<1>();
  }
  return fidelity + p.lambda * penalty;
}

/// Isotropic: W_i = ((D1 x)_i^2 + (D2 x)_i^2 + eps)^{-1/2}.
/// Anisotropic: separate (|(Dk x)_i|^2 + eps)^{-1/2} for each direction.
template <typename Scalar>
TvWeights<Scalar> tv_weights_from_gradients(const Vector<Scalar>& g1, const Vector<Scalar>& g2, Scalar epsilon,
                                            TvVariant variant) {
  TvWeights<Scalar> w;
  if (variant == TvVariant::isotropic) {
    w.vertical = (g1.array().square() + g2.array().square() + epsilon).rsqrt().matrix();
    w.horizontal = w.vertical;
  } else {
    w.vertical = (g1.array().square() + epsilon).rsqrt().matrix();
    w.horizontal = (g2.array().square() + epsilon).rsqrt().matrix();
  }
  return w;
}

template <typename Scalar>
TvWeights<Scalar> tv_update_weights(const TvProblem<Scalar>& p, const Vector<Scalar>& x) {
  return tv_weights_from_gradients<Scalar>(p.vertical().apply(x), p.horizontal().apply(x), p.epsilon,
                                           p.variant);
}

/// Majorizer of F including the x-independent trace term lambda/2 Tr(W^{-1}).
template <typename Scalar>
Scalar tv_surrogate(const TvProblem<Scalar>& p, const Vector<Scalar>& x, const TvWeights<Scalar>& w) {
  const Vector<Scalar> g1 = p.vertical().apply(x);
  const Vector<Scalar> g2 = p.horizontal().apply(x);
  const Scalar fidelity = Scalar(0.5) * (p.op->forward(x) - p.b).squaredNorm();
  const Scalar quadratic = (w.vertical.array() * g1.array().square()).sum() +
                           (w.horizontal.array() * g2.array().square()).sum();
  Scalar trace = w.vertical.cwiseInverse().sum();
  if (p.variant == TvVariant::anisotropic) trace += w.horizontal.cwiseInverse().sum();
  return fidelity + Scalar(0.5) * p.lambda * (quadratic + trace);
}

/// (A^T A + lambda D1^T W1 D1 + lambda D2^T W2 D2) x, matrix-free.
template <typename Scalar>
Vector<Scalar> tv_system_apply(const TvProblem<Scalar>& p, const TvWeights<Scalar>& w, const Vector<Scalar>& x) {
  const auto d1 = p.vertical();
  const auto d2 = p.horizontal();
  Vector<Scalar> out = p.op->normal(x);
  out += p.lambda * d1.adjoint(w.vertical.cwiseProduct(d1.apply(x)));
  out += p.lambda * d2.adjoint(w.horizontal.cwiseProduct(d2.apply(x)));
  return out;
}

// Symmetric matrix with bands at offsets 0, +-1 and +-`offset`.
//
//   a: main diagonal (length N)
//   b: first super/sub-diagonal (length N-1)
//   c: super/sub-diagonal at `offset` (length max(N - offset, 0))
template <typename Scalar>
struct PentaDiagonalMatrix {
  Vector<Scalar> a;
  Vector<Scalar> b;
  Vector<Scalar> c;
  Index offset = 1;

  Index size() const { return a.size(); }

  void validate() const {
    const Index n = size();
    detail::require(n > 0, "penta-diagonal matrix must be non-empty");
    detail::require(offset > 1 || n <= 1, "far band offset must exceed 1");
    detail::require_size(b.size(), n - 1, "first off-diagonal");
    detail::require_size(c.size(), std::max<Index>(n - offset, 0), "far off-diagonal");
  }

  Vector<Scalar> apply(const Vector<Scalar>& x) const {
    detail::require_size(x.size(), size(), "penta-diagonal apply");
    const Index n = size();
    Vector<Scalar> y = a.cwiseProduct(x);
    if (n > 1) {
      y.head(n - 1) += b.cwiseProduct(x.tail(n - 1));
      y.tail(n - 1) += b.cwiseProduct(x.head(n - 1));
    }
    const Index m = c.size();
    if (m > 0) {
      y.head(m) += c.cwiseProduct(x.tail(m));
      y.tail(m) += c.cwiseProduct(x.head(m));
    }
    return y;
  }

  Matrix<Scalar> dense() const {
    const Index n = size();
    Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = a[i];
    for (Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = b[i];
    for (Index i = 0; i < c.size(); ++i) m(i, i + offset) = m(i + offset, i) = c[i];
    return m;
  }
};

/// Bands of P = abar I + lambda D1^T W1 D1 + lambda D2^T W2 D2 on an n x n image.
template <typename Scalar>
PentaDiagonalMatrix<Scalar> tv_penta_assemble(Scalar abar, Scalar lambda, const TvWeights<Scalar>& w, Index side) {
  const Index n = side * side;
  detail::require_size(w.vertical.size(), n, "vertical weights");
  detail::require_size(w.horizontal.size(), n, "horizontal weights");
  PentaDiagonalMatrix<Scalar> p;
  p.offset = side;
  p.a = Vector<Scalar>::Constant(n, abar) + lambda * (w.vertical + w.horizontal);
  if (n > 1) {
    p.a.head(n - 1) += lambda * w.vertical.tail(n - 1);
    p.b = -lambda * w.vertical.tail(n - 1);
  } else {
    p.b.resize(0);
  }
  const Index far = std::max<Index>(n - side, 0);
  if (far > 0) {
    p.a.head(far) += lambda * w.horizontal.tail(far);
    p.c = -lambda * w.horizontal.tail(far);
  } else {
    p.c.resize(0);
  }
  return p;
}

// Incomplete LU factors of a penta-diagonal P, P ~ L U.
//
// L is unit lower triangular with b_i / a_i on the first sub-diagonal and
// c_i / a_i on the sub-diagonal at `offset`; U keeps the upper bands of P
// unchanged (diagonal a, super-diagonals b and c). No pivot is updated, so
// L U = P + (strict lower of P) diag(a)^{-1} (strict upper of P).
template <typename Scalar>
struct IluFactors {
  Vector<Scalar> a;
  Vector<Scalar> b;
  Vector<Scalar> c;
  Vector<Scalar> lower_b;
  Vector<Scalar> lower_c;
  Index offset = 1;

  Index size() const { return a.size(); }

  Matrix<Scalar> lower_dense() const {
    const Index n = size();
    Matrix<Scalar> l = Matrix<Scalar>::Identity(n, n);
    for (Index i = 0; i < lower_b.size(); ++i) l(i + 1, i) = lower_b[i];
    for (Index i = 0; i < lower_c.size(); ++i) l(i + offset, i) = lower_c[i];
    return l;
  }

  Matrix<Scalar> upper_dense() const {
    const Index n = size();
    Matrix<Scalar> u = Matrix<Scalar>::Zero(n, n);
    for (Index i = 0; i < n; ++i) u(i, i) = a[i];
    for (Index i = 0; i < b.size(); ++i) u(i, i + 1) = b[i];
    for (Index i = 0; i < c.size(); ++i) u(i, i + offset) = c[i];
    return u;
  }
};

template <typename Scalar>
IluFactors<Scalar> ilu_factor(const PentaDiagonalMatrix<Scalar>& p) {
  p.validate();
  for (Index i = 0; i < p.size(); ++i) {
    if (!(p.a[i] > Scalar(0))) {
      throw NotPositiveDiagonal("penta-diagonal entry " + std::to_string(i) + " is not positive");
    }
  }
  IluFactors<Scalar> f;
  f.a = p.a;
  f.b = p.b;
  f.c = p.c;
  f.offset = p.offset;
  f.lower_b = p.b.cwiseQuotient(p.a.head(p.b.size()));
  f.lower_c = p.c.cwiseQuotient(p.a.head(p.c.size()));
  return f;
}

/// U^{-1} L^{-1} r by one forward and one backward banded sweep.
template <typename Scalar>
Vector<Scalar> ilu_inverse_apply(const IluFactors<Scalar>& f, const Vector<Scalar>& r) {
  const Index n = f.size();
  detail::require_size(r.size(), n, "ILU solve");
  const Index o = f.offset;
  Vector<Scalar> y = r;
  for (Index i = 1; i < n; ++i) {
    y[i] -= f.lower_b[i - 1] * y[i - 1];
    if (i >= o) y[i] -= f.lower_c[i - o] * y[i - o];
  }
  for (Index i = n - 1; i >= 0; --i) {
    if (f.a[i] == Scalar(0)) throw SingularFactor("zero pivot in U at " + std::to_string(i));
    if (i + 1 < n) y[i] -= f.b[i] * y[i + 1];
    if (i + o < n) y[i] -= f.c[i] * y[i + o];
    y[i] /= f.a[i];
  }
  return y;
}

/// ||P - L U||_F / ||P||_F in O(N), from the dropped product (strict lower) diag(a)^{-1} (strict upper).
template <typename Scalar>
Scalar ilu_relative_error(const PentaDiagonalMatrix<Scalar>& p, const IluFactors<Scalar>& f) {
  const Index n = p.size();
  detail::require_size(f.size(), n, "ILU factors");
  const Index o = p.offset;
  Vector<Scalar> diag = Vector<Scalar>::Zero(n);
  Scalar off(0);
  for (Index i = 0; i < n; ++i) {
    const Scalar lb = i < f.lower_b.size() ? f.lower_b[i] : Scalar(0);
    const Scalar lc = i < f.lower_c.size() ? f.lower_c[i] : Scalar(0);
    const Scalar ub = i < f.b.size() ? f.b[i] : Scalar(0);
    const Scalar uc = i < f.c.size() ? f.c[i] : Scalar(0);
    if (i + 1 < n) diag[i + 1] += lb * ub;
    if (i + o < n) diag[i + o] += lc * uc;
    if (o != 1 && i + o < n) off += Scalar(2) * (lb * uc) * (lb * uc);
  }
  const Scalar p_norm =
      std::sqrt(p.a.squaredNorm() + Scalar(2) * p.b.squaredNorm() + Scalar(2) * p.c.squaredNorm());
  if (p_norm == Scalar(0)) return Scalar(0);
  return std::sqrt(diag.squaredNorm() + off) / p_norm;
}

// FIRLS for total variation.
//
// Each outer iteration recomputes the per-pixel weights at x^k, assembles the
// penta-diagonal P = abar I + lambda (D1^T W D1 + D2^T W D2), factors it
// incompletely and runs PCG on the reweighted normal equations warm-started
// at x^k with U^{-1} L^{-1} as the preconditioner.
template <typename Scalar>
SolveReport<Scalar> firls_tv_solve(const TvProblem<Scalar>& p, const SolveOptions<Scalar>& opts = {}) {
  p.validate();
  detail::validate_options(opts, p.size());
  const Scalar abar = p.op->mean_gram_diagonal();
  detail::require(abar > Scalar(0), "mean of diag(A^T A) must be positive");
  const Vector<Scalar> atb = p.op->adjoint(p.b);
  Vector<Scalar> x = opts.x0 ? *opts.x0 : atb;

  auto objective = [&](const Vector<Scalar>& v) { return tv_objective(p, v); };
  auto inner = [&](const Vector<Scalar>& current) {
    const TvWeights<Scalar> w = tv_update_weights(p, current);
    const IluFactors<Scalar> factors = ilu_factor(tv_penta_assemble(abar, p.lambda, w, p.side));
    return pcg_solve([&](const Vector<Scalar>& v) { return tv_system_apply(p, w, v); },
                     [&](const Vector<Scalar>& r) { return ilu_inverse_apply(factors, r); }, atb, current,
                     opts.pcg);
  };
  return detail::run_reweighted(std::move(x), opts, objective, inner);
}

}  // namespace firls
