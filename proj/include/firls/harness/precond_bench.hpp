#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "firls/core.hpp"

namespace firls::harness {

enum class BenchMatrix { og, tv };

// Inner-solver comparison: plain CG, Jacobi PCG and the structured
// preconditioner on the first reweighted system of a phantom reconstruction.
//
// og: gaussian projection A, Haar Phi, singleton groups, pseudo-diagonal P.
// tv: variable-density Fourier A, isotropic TV, penta-diagonal ILU P.
// Weights come from the zero-filled start A^T b, every solver starts at 0.
struct BenchConfig {
  BenchMatrix matrix = BenchMatrix::og;
  Index side = 64;
  /// Sampling ratio; 0.4 for og and 0.25 for tv when unset.
  std::optional<double> ratio;
  /// Regularization weight; a per-matrix default when unset.
  std::optional<double> lambda;
  int iterations = 200;
  std::uint64_t seed = 0;
};

struct BenchResult {
  double lambda = 0.0;
  double ratio = 0.0;
  /// Relative residual ||S x_j - rhs|| / ||rhs|| for j = 0..iterations.
  std::vector<double> none;
  std::vector<double> jacobi;
  std::vector<double> proposed;
};

BenchResult run_precond_benchmark(const BenchConfig& cfg);

/// Residual after `iteration` steps; the final value if the solver stopped earlier.
double residual_at(const std::vector<double>& trace, int iteration);

/// First iteration whose residual is <= target, or -1.
int iterations_to_reach(const std::vector<double>& trace, double target);

double default_bench_lambda(BenchMatrix matrix);

}  // namespace firls::harness
