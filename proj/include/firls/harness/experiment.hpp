#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "firls/core.hpp"
#include "firls/firls_tv.hpp"
#include "firls/metrics.hpp"
#include "firls/wavelet.hpp"

namespace firls::harness {

enum class ProblemKind { l1, og, tree, mt, tv };
enum class SamplingKind { fourier, gaussian, select };

ProblemKind parse_problem(const std::string& name);
SamplingKind parse_sampling(const std::string& name);
const char* to_string(ProblemKind kind);
const char* to_string(SamplingKind kind);

struct SignalSpec {
  Index length = 0;
  Index sparsity = 0;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::tv;
  /// Input image (8-bit PGM). Without it, and without `signal`, a phantom of `phantom_side` is used.
  std::optional<std::string> image_path;
  std::optional<SignalSpec> signal;
  Index phantom_side = 64;
  SamplingKind sampling = SamplingKind::fourier;
  double ratio = 0.25;
  /// Defaults to 0.01 * ||A^T b||_inf.
  std::optional<double> lambda;
  double epsilon = 1e-10;
  int outer_iterations = 30;
  int pcg_iterations = 30;
  double pcg_tolerance = 1e-8;
  double outer_tolerance = 1e-6;
  std::uint64_t seed = 0;
  Index channels = 3;
  WaveletKind wavelet = WaveletKind::haar;
  /// Wavelet levels; 0 picks min(4, max levels).
  int levels = 0;
  TvVariant tv_variant = TvVariant::isotropic;
  std::optional<std::string> mask_path;
  std::optional<std::string> out_image;
  std::optional<std::string> out_trace;
  std::optional<std::string> out_mask;
  /// Writes 0 in the elapsed_ms column so traces are byte-reproducible.
  bool record_timing = true;
  /// Forwarded to the solver: called with (k, x^k) before outer iteration k.
  std::function<void(int, const Vector<double>&)> on_iterate;

  /// Throws InvalidInput describing the first inconsistency.
  void validate() const;
};

struct ExperimentResult {
  SolveReport<double> report;
  Vector<double> truth;
  Vector<double> zero_filled;
  double lambda = 0.0;
  double zero_filled_snr_db = 0.0;
  Index height = 0;
  Index width = 0;
  std::vector<std::string> warnings;
  /// Header lines echoed into the trace CSV.
  std::vector<std::string> header;
};

/// Builds the operators, simulates noiseless measurements, runs the solver
/// and writes any requested outputs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace firls::harness
