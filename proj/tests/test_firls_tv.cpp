#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "firls/firls_tv.hpp"
#include "firls/harness/generators.hpp"
#include "firls/metrics.hpp"

using namespace firls;
using Op = MeasurementOperator<double>;

namespace {

std::shared_ptr<const Op> shared(Op op) { return std::make_shared<const Op>(std::move(op)); }

Vector<double> random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Vector<double> random_positive(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.1, 3.0);
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = uniform(rng);
  return v;
}

Matrix<double> dense_diff(Index side, DiffDirection dir) {
  const FiniteDifference<double> d(side, dir);
  const Index n = side * side;
  Matrix<double> m(n, n);
  for (Index j = 0; j < n; ++j) m.col(j) = d.apply(Vector<double>::Unit(n, j));
  return m;
}

Matrix<double> dense_penta(double abar, double lambda, const TvWeights<double>& w, Index side) {
  const Matrix<double> d1 = dense_diff(side, DiffDirection::vertical);
  const Matrix<double> d2 = dense_diff(side, DiffDirection::horizontal);
  const Index n = side * side;
  return abar * Matrix<double>::Identity(n, n) + lambda * d1.transpose() * w.vertical.asDiagonal() * d1 +
         lambda * d2.transpose() * w.horizontal.asDiagonal() * d2;
}

TvWeights<double> uniform_weights(Index n) { return {Vector<double>::Ones(n), Vector<double>::Ones(n)}; }

TvProblem<double> zero_operator_problem(Index side, double lambda, TvVariant variant = TvVariant::isotropic) {
  const Index n = side * side;
  return {shared(Op::dense(Matrix<double>::Zero(n, n))), ComplexVector<double>::Zero(n), side, lambda, 1e-10,
          variant};
}

int iterations_to(const Matrix<double>& s, const Vector<double>& rhs, double tol,
                  const std::function<Vector<double>(const Vector<double>&)>& pinv) {
  PcgConfig<double> cfg;
  cfg.max_iterations = 1000;
  cfg.relative_residual_tolerance = tol;
  return pcg_solve<double>([&](const Vector<double>& v) { return Vector<double>(s * v); }, pinv, rhs,
                           Vector<double>(Vector<double>::Zero(rhs.size())), cfg)
      .iterations;
}

}  // namespace

TEST_CASE("tv_objective examples") {
  CHECK(tv_objective(zero_operator_problem(2, 3.0), Vector<double>(Vector<double>::Zero(4))) == 0.0);
  const Vector<double> x{{1.0, 2.0, 4.0, 4.0}};
  CHECK(tv_objective(zero_operator_problem(2, 1.0), x) ==
        doctest::Approx(std::sqrt(2.0) + std::sqrt(5.0) + std::sqrt(13.0) + 2.0));
  CHECK(tv_objective(zero_operator_problem(2, 1.0, TvVariant::anisotropic), x) == doctest::Approx(4.0 + 8.0));

  // A constant image still pays for the first rows of D1 and D2.
  const Index side = 4;
  const Vector<double> c = Vector<double>::Constant(side * side, 2.5);
  const Vector<double> g1 = dense_diff(side, DiffDirection::vertical) * c;
  const Vector<double> g2 = dense_diff(side, DiffDirection::horizontal) * c;
  const double expected = (g1.array().square() + g2.array().square()).sqrt().sum();
  CHECK(expected > 0.0);
  CHECK(tv_objective(zero_operator_problem(side, 1.0), c) == doctest::Approx(expected));
}

TEST_CASE("tv weights") {
  const auto w = tv_weights_from_gradients<double>(Vector<double>{{3.0}}, Vector<double>{{4.0}}, 0.0,
                                                   TvVariant::isotropic);
  CHECK(w.vertical[0] == doctest::Approx(0.2));
  CHECK(w.horizontal[0] == doctest::Approx(0.2));
  const auto z = tv_weights_from_gradients<double>(Vector<double>{{0.0}}, Vector<double>{{0.0}}, 1e-10,
                                                   TvVariant::isotropic);
  CHECK(z.vertical[0] == doctest::Approx(1e5).epsilon(1e-12));

  // Gradients equal to x itself reduce the weights to the l1 reweighting 1/|x_i|.
  const Vector<double> x{{0.5, -2.0, 4.0}};
  const auto a = tv_weights_from_gradients<double>(x, Vector<double>(Vector<double>::Zero(3)), 0.0,
                                                   TvVariant::anisotropic);
  for (Index i = 0; i < 3; ++i) CHECK(a.vertical[i] == doctest::Approx(1.0 / std::abs(x[i])));
}

TEST_CASE("penta-diagonal assembly matches the dense oracle") {
  std::mt19937_64 rng(1);
  for (Index side : {2, 3, 4}) {
    for (TvVariant variant : {TvVariant::isotropic, TvVariant::anisotropic}) {
      const Index n = side * side;
      TvWeights<double> w{random_positive(n, rng), random_positive(n, rng)};
      if (variant == TvVariant::isotropic) w.horizontal = w.vertical;
      const auto p = tv_penta_assemble(0.7, 0.3, w, side);
      const Matrix<double> dense = p.dense();
      CHECK((dense - dense_penta(0.7, 0.3, w, side)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(dense == dense.transpose());
    }
  }
  const auto p = tv_penta_assemble(1.0, 1.0, uniform_weights(4), 2);
  CHECK((p.dense() - dense_penta(1.0, 1.0, uniform_weights(4), 2)).cwiseAbs().maxCoeff() < 1e-12);
  const auto zero = tv_penta_assemble(0.4, 0.0, uniform_weights(9), 3);
  CHECK(zero.a == Vector<double>::Constant(9, 0.4));
  CHECK(zero.b.isZero());
  CHECK(zero.c.isZero());
}

TEST_CASE("ILU on a tridiagonal 2x2") {
  PentaDiagonalMatrix<double> p{Vector<double>{{2.0, 2.0}}, Vector<double>{{-1.0}}, Vector<double>(0), 2};
  const auto f = ilu_factor(p);
  CHECK(f.lower_b[0] == doctest::Approx(-0.5));
  CHECK(f.a == p.a);
  CHECK(f.b == p.b);
  const Matrix<double> diff = f.lower_dense() * f.upper_dense() - p.dense();
  CHECK(diff(1, 1) == doctest::Approx(0.5));
  CHECK(diff.cwiseAbs().sum() == doctest::Approx(0.5));
  CHECK(ilu_relative_error(p, f) == doctest::Approx(0.5 / p.dense().norm()));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector<double> v = random_vector(2, rng);
    const Vector<double> oracle = f.upper_dense().triangularView<Eigen::Upper>().solve(
        f.lower_dense().triangularView<Eigen::UnitLower>().solve(p.apply(v)));
    CHECK((ilu_inverse_apply(f, p.apply(v)) - oracle).norm() < 1e-12);
  }
}

TEST_CASE("ILU on the diagonally dominant 9x9 assembly") {
  const auto p = tv_penta_assemble(1.0, 0.1, uniform_weights(9), 3);
  const auto f = ilu_factor(p);
  const Matrix<double> lu = f.lower_dense() * f.upper_dense();
  const double dense_ratio = (p.dense() - lu).norm() / p.dense().norm();
  CHECK(dense_ratio < 0.02);
  CHECK(ilu_relative_error(p, f) == doctest::Approx(dense_ratio).epsilon(1e-12));

  std::mt19937_64 rng(3);
  const Vector<double> v = random_vector(9, rng);
  CHECK((ilu_inverse_apply(f, p.apply(v)) - v).norm() / v.norm() < 0.05);

  const Matrix<double> s = p.dense();
  const Vector<double> rhs = random_vector(9, rng);
  const int with_ilu = iterations_to(s, rhs, 1e-6, [&](const Vector<double>& r) { return ilu_inverse_apply(f, r); });
  const int plain = iterations_to(s, rhs, 1e-6, [](const Vector<double>& r) { return r; });
  CHECK(with_ilu <= 3);
  CHECK(plain >= 6);
}

TEST_CASE("ILU residual oracle and limits") {
  std::mt19937_64 rng(4);
  for (Index side : {3, 5, 8}) {
    const Index n = side * side;
    const auto p = tv_penta_assemble(0.5, 0.8, TvWeights<double>{random_positive(n, rng), random_positive(n, rng)},
                                     side);
    const auto f = ilu_factor(p);
    const double dense_ratio = (p.dense() - f.lower_dense() * f.upper_dense()).norm() / p.dense().norm();
    CHECK(ilu_relative_error(p, f) == doctest::Approx(dense_ratio).epsilon(1e-10));
  }

  const auto diagonal = tv_penta_assemble(2.0, 1e-14, uniform_weights(16), 4);
  const auto f = ilu_factor(diagonal);
  CHECK((f.lower_dense() * f.upper_dense() - diagonal.dense()).cwiseAbs().maxCoeff() < 1e-20);

  PentaDiagonalMatrix<double> identity{Vector<double>::Ones(9), Vector<double>::Zero(8), Vector<double>::Zero(6), 3};
  const Vector<double> r = random_vector(9, rng);
  CHECK(ilu_inverse_apply(ilu_factor(identity), r) == r);
}

TEST_CASE("ILU residual shrinks as the diagonal grows") {
  std::mt19937_64 rng(5);
  const Index side = 8, n = side * side;
  const TvWeights<double> w{random_positive(n, rng), random_positive(n, rng)};
  double previous = std::numeric_limits<double>::infinity();
  for (double abar : {0.1, 1.0, 10.0}) {
    const auto p = tv_penta_assemble(abar, 0.5, w, side);
    const double ratio = ilu_relative_error(p, ilu_factor(p));
    CHECK(ratio < previous);
    previous = ratio;
  }
}

TEST_CASE("ILU preconditioning needs no more iterations than Jacobi") {
  const Index side = 32, n = side * side;
  const double lambda = 0.1;
  const Vector<double> phantom = harness::gen_shepp_logan(side);
  std::mt19937_64 rng(6);
  int wins = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    TvProblem<double> p{shared(Op::partial_fourier(side, side, harness::gen_fourier_mask(side, 0.25, 100 + t))),
                        ComplexVector<double>(), side, lambda};
    const Vector<double> image = phantom + 0.05 * random_vector(n, rng);
    p.b = p.op->forward(image);
    const Vector<double> atb = p.op->adjoint(p.b);
    const auto w = tv_update_weights(p, atb);
    const auto penta = tv_penta_assemble(p.op->mean_gram_diagonal(), lambda, w, side);
    const auto f = ilu_factor(penta);
    const Vector<double> jacobi = penta.a.cwiseInverse();
    PcgConfig<double> cfg;
    cfg.max_iterations = 2000;
    cfg.relative_residual_tolerance = 1e-6;
    auto system = [&](const Vector<double>& v) { return tv_system_apply(p, w, v); };
    const Vector<double> zero = Vector<double>::Zero(n);
    const int ilu =
        pcg_solve<double>(system, [&](const Vector<double>& r) { return ilu_inverse_apply(f, r); }, atb, zero, cfg)
            .iterations;
    const int jac = pcg_solve<double>(
                        system, [&](const Vector<double>& r) { return Vector<double>(jacobi.cwiseProduct(r)); },
                        atb, zero, cfg)
                        .iterations;
    if (ilu <= jac) ++wins;
  }
  CHECK(wins >= 18);
}

TEST_CASE("tv_system_apply") {
  std::mt19937_64 rng(7);
  const Vector<double> x = random_vector(4, rng);
  TvProblem<double> id{shared(Op::dense(Matrix<double>::Identity(4, 4))), ComplexVector<double>::Zero(4), 2, 1e-300};
  CHECK((tv_system_apply(id, uniform_weights(4), x) - x).norm() < 1e-15);

  const auto p = zero_operator_problem(2, 1.0);
  const Matrix<double> d1 = dense_diff(2, DiffDirection::vertical), d2 = dense_diff(2, DiffDirection::horizontal);
  const Vector<double> expected = (d1.transpose() * d1 + d2.transpose() * d2) * x;
  CHECK((tv_system_apply(p, uniform_weights(4), x) - expected).cwiseAbs().maxCoeff() < 1e-12);

  const Index side = 8, n = side * side;
  TvProblem<double> q{shared(Op::partial_fourier(side, side, harness::gen_fourier_mask(side, 0.3, 8))),
                      ComplexVector<double>(), side, 0.4};
  const TvWeights<double> w{random_positive(n, rng), random_positive(n, rng)};
  for (int trial = 0; trial < 10; ++trial) {
    const Vector<double> u = random_vector(n, rng), v = random_vector(n, rng);
    const double lhs = tv_system_apply(q, w, u).dot(v), rhs = u.dot(tv_system_apply(q, w, v));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("majorization sandwich") {
  std::mt19937_64 rng(9);
  const Index side = 6, n = side * side;
  for (TvVariant variant : {TvVariant::isotropic, TvVariant::anisotropic}) {
    TvProblem<double> p{shared(Op::gaussian(20, n, 10)), ComplexVector<double>(), side, 0.3, 1e-10, variant};
    p.b = random_vector(20, rng).cast<std::complex<double>>();
    for (int trial = 0; trial < 5; ++trial) {
      const Vector<double> xk = random_vector(n, rng);
      const auto w = tv_update_weights(p, xk);
      const double f = tv_objective(p, xk);
      CHECK(std::abs(tv_surrogate(p, xk, w) - f) <= 1e-9 * f);
      for (int j = 0; j < 5; ++j) {
        const Vector<double> x = random_vector(n, rng);
        CHECK(tv_objective(p, x) <= tv_surrogate(p, x, w) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("identity operator recovers a constant image") {
  const Index side = 8, n = side * side;
  const Vector<double> c = Vector<double>::Constant(n, 3.0);
  TvProblem<double> p{shared(Op::dense(Matrix<double>::Identity(n, n))), c.cast<std::complex<double>>(), side,
                      1e-8};
  const auto report = firls_tv_solve(p);
  CHECK((report.solution - c).norm() / c.norm() < 1e-4);
}

TEST_CASE("phantom beats the zero-filled reconstruction") {
  const Index side = 64;
  const Vector<double> truth = harness::gen_shepp_logan(side);
  TvProblem<double> p{shared(Op::partial_fourier(side, side, harness::gen_fourier_mask(side, 0.25, 11))),
                      ComplexVector<double>(), side, 0.0};
  p.b = p.op->forward(truth);
  const Vector<double> zero_filled = p.op->adjoint(p.b);
  p.lambda = 0.01 * zero_filled.cwiseAbs().maxCoeff();
  SolveOptions<double> opts;
  opts.outer_iterations = 30;
  opts.outer_tolerance = 0.0;
  opts.pcg.max_iterations = 30;
  const auto report = firls_tv_solve(p, opts);
  CHECK(report.monotone);
  CHECK(snr(truth, report.solution) >= snr(truth, zero_filled) + 5.0);
}

TEST_CASE("converged solution satisfies the reweighted normal equations") {
  const Index side = 16, n = side * side;
  std::mt19937_64 rng(12);
  TvProblem<double> p{shared(Op::partial_fourier(side, side, harness::gen_fourier_mask(side, 0.5, 13))),
                      ComplexVector<double>(), side, 0.05, 1e-4};
  p.b = p.op->forward(Vector<double>(harness::gen_shepp_logan(side) + 0.02 * random_vector(n, rng)));
  SolveOptions<double> opts;
  opts.outer_iterations = 2000;
  opts.outer_tolerance = 1e-12;
  opts.pcg.max_iterations = 300;
  opts.pcg.relative_residual_tolerance = 1e-13;
  const auto report = firls_tv_solve(p, opts);
  CHECK(report.monotone);
  const Vector<double> atb = p.op->adjoint(p.b);
  const auto w = tv_update_weights(p, report.solution);
  CHECK((tv_system_apply(p, w, report.solution) - atb).norm() / atb.norm() < 1e-5);
}

TEST_CASE("factorization errors") {
  PentaDiagonalMatrix<double> p{Vector<double>{{1.0, 0.0, 1.0, 1.0}}, Vector<double>::Zero(3),
                                Vector<double>::Zero(2), 2};
  CHECK_THROWS_AS(ilu_factor(p), NotPositiveDiagonal);
  p.a[1] = -1.0;
  CHECK_THROWS_AS(ilu_factor(p), NotPositiveDiagonal);

  IluFactors<double> f;
  f.a = Vector<double>{{1.0, 0.0}};
  f.b = Vector<double>::Zero(1);
  f.c = Vector<double>(0);
  f.lower_b = Vector<double>::Zero(1);
  f.lower_c = Vector<double>(0);
  f.offset = 2;
  CHECK_THROWS_AS(ilu_inverse_apply(f, Vector<double>(Vector<double>::Ones(2))), SingularFactor);
}

TEST_CASE("problem validation") {
  TvProblem<double> p{shared(Op::dense(Matrix<double>::Identity(9, 9))), ComplexVector<double>::Zero(9), 3, 0.0};
  CHECK_THROWS_AS(firls_tv_solve(p), InvalidInput);
  p.lambda = 1.0;
  p.side = 4;
  CHECK_THROWS_AS(firls_tv_solve(p), InvalidInput);
}
