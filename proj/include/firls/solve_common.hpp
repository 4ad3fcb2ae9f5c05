#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "firls/core.hpp"
#include "firls/metrics.hpp"
#include "firls/pcg.hpp"

namespace firls {

/// Outer-loop settings shared by the reweighted solvers.
template <typename Scalar>
struct SolveOptions {
  int outer_iterations = 100;
  PcgConfig<Scalar> pcg{};
  /// Stop once ||x^{k+1} - x^k|| / ||x^k|| falls below this.
  Scalar outer_tolerance = Scalar(1e-6);
  /// Initial iterate; A^T b when empty.
  std::optional<Vector<Scalar>> x0;
  /// Ground truth, enables the MSE and SNR columns of the report.
  std::optional<Vector<Scalar>> truth;
  /// Called with (k, x^k) before the weights are refreshed in outer iteration k.
  std::function<void(int, const Vector<Scalar>&)> on_iterate;
};

/// A solve hit a non-finite value; carries the report up to the failure.
template <typename Scalar>
class SolveBreakdown : public NumericalBreakdown {
 public:
  SolveBreakdown(const std::string& what, SolveReport<Scalar> partial)
      : NumericalBreakdown(what), partial_(std::move(partial)) {}

  const SolveReport<Scalar>& partial_report() const { return partial_; }

 private:
  SolveReport<Scalar> partial_;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <typename Scalar>
Scalar relative_change(const Vector<Scalar>& previous, const Vector<Scalar>& next) {
  const Scalar diff = (next - previous).norm();
  const Scalar scale = previous.norm();
  if (scale == Scalar(0)) return diff == Scalar(0) ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
  return diff / scale;
}

template <typename Scalar>
IterationRecord make_record(int iteration, Scalar objective, const Vector<Scalar>& x, int pcg_iterations,
                            double elapsed_ms, const std::optional<Vector<Scalar>>& truth) {
  IterationRecord rec;
  rec.iteration = iteration;
  rec.objective = static_cast<double>(objective);
  rec.pcg_iterations = pcg_iterations;
  rec.elapsed_ms = elapsed_ms;
  if (truth) {
    rec.mse = static_cast<double>(mse(*truth, x));
    if (population_variance(*truth) > Scalar(0)) rec.snr_db = static_cast<double>(snr(*truth, x));
  }
  return rec;
}

template <typename Scalar>
void validate_options(const SolveOptions<Scalar>& opts, Index size) {
  require(opts.outer_iterations >= 1, "need at least one outer iteration");
  require(opts.outer_tolerance >= Scalar(0), "outer tolerance must be non-negative");
  opts.pcg.validate();
  if (opts.x0) require_size(opts.x0->size(), size, "initial iterate");
  if (opts.truth) require_size(opts.truth->size(), size, "ground truth");
}

// Majorization-minimization outer loop shared by the FIRLS solvers.
//
// `inner(x)` refreshes the weights at x and returns the warm-started PCG
// result for the reweighted system; `objective(x)` evaluates F. Records one
// row per outer iteration and flags the report when F ever increases.
template <typename Scalar, typename Objective, typename Inner>
SolveReport<Scalar> run_reweighted(Vector<Scalar> x, const SolveOptions<Scalar>& opts, Objective&& objective,
                                   Inner&& inner) {
  Stopwatch clock;
  SolveReport<Scalar> report;
  const Scalar f0 = objective(x);
  report.initial_objective = static_cast<double>(f0);
  if (!std::isfinite(static_cast<double>(f0))) {
    report.solution = x;
    throw SolveBreakdown<Scalar>("non-finite objective at the initial iterate", std::move(report));
  }

  for (int k = 1; k <= opts.outer_iterations; ++k) {
    if (opts.on_iterate) opts.on_iterate(k, x);
    PcgResult<Scalar> step;
    try {
      step = inner(x);
    } catch (const PcgBreakdown<Scalar>& e) {
      report.solution = x;
      report.monotone = is_monotone(report.objectives());
      throw SolveBreakdown<Scalar>(std::string("outer iteration ") + std::to_string(k) + ": " + e.what(),
                                   std::move(report));
    }
    const Scalar change = relative_change(x, step.solution);
    x = std::move(step.solution);
    const Scalar f = objective(x);
    report.records.push_back(make_record(k, f, x, step.iterations, clock.elapsed_ms(), opts.truth));
    if (!std::isfinite(static_cast<double>(f))) {
      report.solution = x;
      report.monotone = false;
      throw SolveBreakdown<Scalar>("non-finite objective at outer iteration " + std::to_string(k),
                                   std::move(report));
    }
    if (change < opts.outer_tolerance) {
      report.converged = true;
      break;
    }
  }
  report.solution = std::move(x);
  report.monotone = is_monotone(report.objectives());
  return report;
}

}  // namespace detail

}  // namespace firls
