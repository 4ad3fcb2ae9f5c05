#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "firls/pcg.hpp"

using namespace firls;

namespace {

Matrix<double> random_spd(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix<double> a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  return a.transpose() * a / double(n) + Matrix<double>::Identity(n, n);
}

Vector<double> random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector<double> v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

auto as_map(const Matrix<double>& m) {
  return [&m](const Vector<double>& v) { return Vector<double>(m * v); };
}

auto identity_map() {
  return [](const Vector<double>& v) { return v; };
}

}  // namespace

TEST_CASE("identity system solves in one iteration") {
  const Vector<double> r = random_vector(6, 1);
  const auto res = cg_solve<double>(identity_map(), r, Vector<double>::Zero(6), PcgConfig<double>{});
  CHECK(res.iterations == 1);
  CHECK(res.converged);
  CHECK((res.solution - r).norm() < 1e-14);
}

TEST_CASE("exact preconditioner converges in one iteration") {
  const Vector<double> diag = Vector<double>::LinSpaced(8, 1.0, 8.0);
  const Vector<double> rhs = random_vector(8, 2);
  PcgConfig<double> cfg;
  cfg.relative_residual_tolerance = 1e-12;
  const auto res = pcg_solve<double>([&](const Vector<double>& v) { return Vector<double>(diag.cwiseProduct(v)); },
                                     [&](const Vector<double>& v) { return Vector<double>(v.cwiseQuotient(diag)); },
                                     rhs, Vector<double>::Zero(8), cfg);
  CHECK(res.iterations == 1);
  CHECK((res.solution - rhs.cwiseQuotient(diag)).norm() < 1e-12);
}

TEST_CASE("matches a dense direct solve within N iterations") {
  const Matrix<double> s = random_spd(16, 3);
  const Vector<double> rhs = random_vector(16, 4);
  PcgConfig<double> cfg;
  cfg.max_iterations = 16;
  cfg.relative_residual_tolerance = 1e-14;
  const auto res = cg_solve<double>(as_map(s), rhs, Vector<double>::Zero(16), cfg);
  CHECK(res.iterations <= 16);
  CHECK((res.solution - s.ldlt().solve(rhs)).norm() < 1e-8);
}

TEST_CASE("residual below 1e-6 after N iterations on random SPD systems") {
  for (Index n : {4, 12, 32}) {
    const Matrix<double> s = random_spd(n, 10 + n);
    const Vector<double> rhs = random_vector(n, 20 + n);
    const Vector<double> jacobi = s.diagonal().cwiseInverse();
    PcgConfig<double> cfg;
    cfg.max_iterations = static_cast<int>(n);
    cfg.relative_residual_tolerance = 1e-12;
    cfg.record_residual_trace = true;
    const auto res = pcg_solve<double>(
        as_map(s), [&](const Vector<double>& v) { return Vector<double>(jacobi.cwiseProduct(v)); }, rhs,
        Vector<double>::Zero(n), cfg);
    CHECK((s * res.solution - rhs).norm() / rhs.norm() < 1e-6);
    CHECK(res.residual_trace.back() <= res.residual_trace.front());
    CHECK(res.residual_trace.size() == static_cast<std::size_t>(res.iterations + 1));
  }
}

TEST_CASE("energy never increases along the iterates") {
  const Matrix<double> s = random_spd(24, 5);
  const Vector<double> rhs = random_vector(24, 6);
  auto energy = [&](const Vector<double>& x) { return 0.5 * x.dot(s * x) - rhs.dot(x); };
  Vector<double> x = random_vector(24, 7);
  double previous = energy(x);
  PcgConfig<double> cfg;
  cfg.max_iterations = 1;
  for (int k = 0; k < 20; ++k) {
    // One-step restarts expose every intermediate iterate of a warm-started solve.
    x = cg_solve<double>(as_map(s), rhs, x, cfg).solution;
    const double e = energy(x);
    CHECK(e <= previous + 1e-12 * std::abs(previous));
    previous = e;
  }
  PcgConfig<double> full;
  full.max_iterations = 10;
  const Vector<double> start = random_vector(24, 8);
  CHECK(energy(cg_solve<double>(as_map(s), rhs, start, full).solution) <= energy(start));
}

TEST_CASE("warm start at the solution returns immediately") {
  const Matrix<double> s = random_spd(6, 9);
  const Vector<double> rhs = random_vector(6, 10);
  const auto res = cg_solve<double>(as_map(s), rhs, Vector<double>(s.ldlt().solve(rhs)), PcgConfig<double>{});
  CHECK(res.iterations == 0);
  CHECK(res.converged);
}

TEST_CASE("zero right-hand side gives zero") {
  const auto res = cg_solve<double>(identity_map(), Vector<double>::Zero(3), Vector<double>::Ones(3), PcgConfig<double>{});
  CHECK(res.solution.isZero());
}

TEST_CASE("configuration validation") {
  PcgConfig<double> cfg;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg.max_iterations = 5;
  cfg.relative_residual_tolerance = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  CHECK_THROWS_AS(cg_solve<double>(identity_map(), Vector<double>::Ones(3), Vector<double>::Ones(2), PcgConfig<double>{}),
                  InvalidInput);
}

TEST_CASE("breakdown carries the last finite iterate") {
  const Vector<double> rhs = Vector<double>::Ones(3);
  auto indefinite = [](const Vector<double>& v) { return Vector<double>(-v); };
  try {
    cg_solve<double>(indefinite, rhs, Vector<double>::Zero(3), PcgConfig<double>{});
    FAIL("expected a breakdown");
  } catch (const PcgBreakdown<double>& e) {
    CHECK(e.iteration() == 1);
    CHECK(e.last_iterate().allFinite());
  }
  auto nan_map = [](const Vector<double>& v) {
    return Vector<double>(Vector<double>::Constant(v.size(), std::numeric_limits<double>::quiet_NaN()));
  };
  CHECK_THROWS_AS(cg_solve<double>(nan_map, rhs, Vector<double>::Zero(3), PcgConfig<double>{}), NumericalBreakdown);
}

TEST_CASE("float instantiation") {
  Eigen::VectorXf rhs = Eigen::VectorXf::LinSpaced(5, 1.0f, 5.0f);
  PcgConfig<float> cfg;
  cfg.relative_residual_tolerance = 1e-5f;
  const auto res = cg_solve<float>([](const Eigen::VectorXf& v) { return Eigen::VectorXf(2.0f * v); }, rhs,
                                   Eigen::VectorXf::Zero(5), cfg);
  CHECK((res.solution - 0.5f * rhs).norm() < 1e-5f);
}
