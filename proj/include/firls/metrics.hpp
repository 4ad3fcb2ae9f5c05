#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "firls/core.hpp"

namespace firls {

/// Mean of squared differences.
template <typename Scalar>
Scalar mse(const Vector<Scalar>& reference, const Vector<Scalar>& x) {
  detail::require_size(x.size(), reference.size(), "mse");
  detail::require(reference.size() > 0, "mse of empty vectors");
  return (x - reference).squaredNorm() / Scalar(reference.size());
}

/// ||x - x0|| / ||x0||.
template <typename Scalar>
Scalar relative_error(const Vector<Scalar>& reference, const Vector<Scalar>& x) {
  detail::require_size(x.size(), reference.size(), "relative error");
  const Scalar denom = reference.norm();
  if (denom == Scalar(0)) throw UndefinedMetric("relative error against a zero reference");
  return (x - reference).norm() / denom;
}

/// Variance with the population convention (divide by N).
template <typename Scalar>
Scalar population_variance(const Vector<Scalar>& v) {
  detail::require(v.size() > 0, "variance of an empty vector");
  const Scalar mean = v.mean();
  return (v.array() - mean).square().sum() / Scalar(v.size());
}

/// 10 log10(var(x0) / mse(x0, x)) in dB; +inf for an exact reconstruction.
template <typename Scalar>
Scalar snr(const Vector<Scalar>& reference, const Vector<Scalar>& x) {
  const Scalar signal = population_variance(reference);
  if (signal == Scalar(0)) throw UndefinedMetric("SNR undefined for a constant reference");
  const Scalar noise = mse(reference, x);
  if (noise == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return Scalar(10) * std::log10(signal / noise);
}

inline constexpr const char* kVarianceConvention = "population";

/// One outer iteration of a reweighted solve.
struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double mse = std::numeric_limits<double>::quiet_NaN();
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  int pcg_iterations = 0;
  double elapsed_ms = 0.0;
};

template <typename Scalar>
struct SolveReport {
  Vector<Scalar> solution;
  double initial_objective = 0.0;
  std::vector<IterationRecord> records;
  /// Outer stopping rule fired before the iteration budget ran out.
  bool converged = false;
  /// Objective trace was non-increasing within the descent tolerance.
  bool monotone = true;

  std::vector<double> objectives() const {
    std::vector<double> out;
    out.reserve(records.size() + 1);
    out.push_back(initial_objective);
    for (const auto& r : records) out.push_back(r.objective);
    return out;
  }
};

/// Relative slack allowed when checking F(x^{k+1}) <= F(x^k).
inline constexpr double kDescentTolerance = 1e-9;

/// True when every step satisfies F_{k+1} <= F_k + tol * F_0.
inline bool is_monotone(const std::vector<double>& trace, double tol = kDescentTolerance) {
  if (trace.empty()) return true;
  const double slack = tol * std::abs(trace.front());
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (!(trace[k] <= trace[k - 1] + slack)) return false;
  }
  return true;
}

}  // namespace firls
