#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "firls/core.hpp"
#include "firls/harness/experiment.hpp"
#include "firls/harness/precond_bench.hpp"
#include "firls/solve_common.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitBreakdown = 3;
constexpr int kExitIo = 4;

firls::harness::SignalSpec parse_signal(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw firls::InvalidInput("--signal expects N,K");
  try {
    std::size_t used = 0;
    const long long n = std::stoll(text.substr(0, comma), &used);
    if (used != comma) throw firls::InvalidInput("--signal expects N,K");
    const std::string rest = text.substr(comma + 1);
    const long long k = std::stoll(rest, &used);
    if (used != rest.size()) throw firls::InvalidInput("--signal expects N,K");
    return {static_cast<firls::Index>(n), static_cast<firls::Index>(k)};
  } catch (const std::logic_error&) {
    throw firls::InvalidInput("--signal expects N,K");
  }
}

firls::WaveletKind parse_wavelet(const std::string& name) {
  if (name == "haar") return firls::WaveletKind::haar;
  if (name == "db4") return firls::WaveletKind::db4;
  if (name == "identity") return firls::WaveletKind::identity;
  throw firls::InvalidInput("unknown wavelet: " + name);
}

firls::TvVariant parse_variant(const std::string& name) {
  if (name == "isotropic") return firls::TvVariant::isotropic;
  if (name == "anisotropic") return firls::TvVariant::anisotropic;
  throw firls::InvalidInput("unknown TV variant: " + name);
}

struct SolveArgs {
  std::string problem = "tv";
  std::optional<std::string> image;
  std::optional<std::string> signal;
  std::string sampling = "fourier";
  double ratio = 0.25;
  std::optional<double> lambda;
  double epsilon = 1e-10;
  int outer = 30;
  int pcg_iters = 30;
  double pcg_tol = 1e-8;
  std::uint64_t seed = 0;
  long long channels = 3;
  std::string wavelet = "haar";
  int levels = 0;
  std::string variant = "isotropic";
  long long phantom = 64;
  std::optional<std::string> mask;
  std::optional<std::string> out_image;
  std::optional<std::string> out_trace;
  std::optional<std::string> out_mask;
  bool no_timing = false;
};

struct BenchArgs {
  std::string matrix = "og";
  long long side = 64;
  std::optional<double> ratio;
  std::optional<double> lambda;
  int iterations = 200;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

int run_solve(const SolveArgs& a) {
  firls::harness::ExperimentConfig cfg;
  cfg.problem = firls::harness::parse_problem(a.problem);
  cfg.image_path = a.image;
  if (a.signal) cfg.signal = parse_signal(*a.signal);
  cfg.sampling = firls::harness::parse_sampling(a.sampling);
  cfg.ratio = a.ratio;
  cfg.lambda = a.lambda;
  cfg.epsilon = a.epsilon;
  cfg.outer_iterations = a.outer;
  cfg.pcg_iterations = a.pcg_iters;
  cfg.pcg_tolerance = a.pcg_tol;
  cfg.seed = a.seed;
  cfg.channels = a.channels;
  cfg.wavelet = parse_wavelet(a.wavelet);
  cfg.levels = a.levels;
  cfg.tv_variant = parse_variant(a.variant);
  cfg.phantom_side = a.phantom;
  cfg.mask_path = a.mask;
  cfg.out_image = a.out_image;
  cfg.out_trace = a.out_trace;
  cfg.out_mask = a.out_mask;
  cfg.record_timing = !a.no_timing;

  const auto result = firls::harness::run_experiment(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  const auto& report = result.report;
  std::printf("lambda            %.6g\n", result.lambda);
  std::printf("outer iterations  %zu%s\n", report.records.size(), report.converged ? " (converged)" : "");
  std::printf("objective         %.10g -> %.10g\n", report.initial_objective,
              report.records.empty() ? report.initial_objective : report.records.back().objective);
  if (!report.records.empty()) {
    std::printf("mse               %.6g\n", report.records.back().mse);
    std::printf("snr_db            %.3f (zero-filled %.3f)\n", report.records.back().snr_db,
                result.zero_filled_snr_db);
  }
  std::printf("monotone          %s\n", report.monotone ? "yes" : "NO");
  if (!report.monotone) {
    std::cerr << "error: objective trace increased; run flagged failed\n";
    return kExitBreakdown;
  }
  return kExitOk;
}

int run_bench(const BenchArgs& a) {
  firls::harness::BenchConfig cfg;
  if (a.matrix == "og") {
    cfg.matrix = firls::harness::BenchMatrix::og;
  } else if (a.matrix == "tv") {
    cfg.matrix = firls::harness::BenchMatrix::tv;
  } else {
    throw firls::InvalidInput("unknown bench matrix: " + a.matrix);
  }
  cfg.side = a.side;
  cfg.ratio = a.ratio;
  cfg.lambda = a.lambda;
  cfg.iterations = a.iterations;
  cfg.seed = a.seed;
  const auto r = firls::harness::run_precond_benchmark(cfg);

  std::printf("matrix=%s side=%lld ratio=%g lambda=%g seed=%llu\n", a.matrix.c_str(), a.side, r.ratio, r.lambda,
              static_cast<unsigned long long>(a.seed));
  std::printf("%6s %14s %14s %14s\n", "iter", "none", "jacobi", "proposed");
  for (int it : {0, 10, 20, 50, 100, 200, 500}) {
    if (it > a.iterations) break;
    std::printf("%6d %14.6e %14.6e %14.6e\n", it, firls::harness::residual_at(r.none, it),
                firls::harness::residual_at(r.jacobi, it), firls::harness::residual_at(r.proposed, it));
  }
  if (a.out) {
    std::ofstream out(*a.out);
    if (!out) throw firls::IoError("cannot write " + *a.out);
    out << "iter,none,jacobi,proposed\n";
    out.precision(12);
    for (int it = 0; it <= a.iterations; ++it) {
      out << it << ',' << firls::harness::residual_at(r.none, it) << ',' << firls::harness::residual_at(r.jacobi, it)
          << ',' << firls::harness::residual_at(r.proposed, it) << '\n';
    }
    if (!out) throw firls::IoError("failed writing " + *a.out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast iteratively reweighted least squares for sparse reconstruction"};
  app.require_subcommand(1);

  SolveArgs s;
  auto* solve = app.add_subcommand("solve", "Reconstruct a synthetic signal or an image");
  solve->add_option("--problem", s.problem, "l1 | og | tree | mt | tv")->capture_default_str();
  auto* image = solve->add_option("--image", s.image, "Input 8-bit PGM image");
  auto* signal = solve->add_option("--signal", s.signal, "Synthetic sparse signal N,K");
  image->excludes(signal);
  solve->add_option("--sampling", s.sampling, "fourier | gaussian | select")->capture_default_str();
  solve->add_option("--ratio", s.ratio, "Sampling ratio in (0, 1]")->capture_default_str();
  solve->add_option("--lambda", s.lambda, "Regularization weight (default 0.01 ||A^T b||_inf)");
  solve->add_option("--epsilon", s.epsilon, "Weight smoothing")->capture_default_str();
  solve->add_option("--outer", s.outer, "Outer iterations")->capture_default_str();
  solve->add_option("--pcg-iters", s.pcg_iters, "PCG iterations per outer step")->capture_default_str();
  solve->add_option("--pcg-tol", s.pcg_tol, "PCG relative residual tolerance")->capture_default_str();
  solve->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  solve->add_option("--channels", s.channels, "Channels for mt")->capture_default_str();
  solve->add_option("--wavelet", s.wavelet, "haar | db4 | identity")->capture_default_str();
  solve->add_option("--levels", s.levels, "Wavelet levels (0 = auto)")->capture_default_str();
  solve->add_option("--variant", s.variant, "isotropic | anisotropic")->capture_default_str();
  solve->add_option("--phantom-size", s.phantom, "Phantom side when no input is given")->capture_default_str();
  solve->add_option("--mask", s.mask, "Read the sampling index set from a mask file");
  solve->add_option("--out-image", s.out_image, "Write the reconstruction as PGM");
  solve->add_option("--out-trace", s.out_trace, "Write the per-iteration CSV trace");
  solve->add_option("--out-mask", s.out_mask, "Write the sampling index set");
  solve->add_flag("--no-timing", s.no_timing, "Write 0 in the elapsed_ms column");

  BenchArgs b;
  auto* bench = app.add_subcommand("bench-precond", "Compare CG, Jacobi PCG and the structured preconditioner");
  bench->add_option("--matrix", b.matrix, "og | tv")->capture_default_str();
  bench->add_option("--side", b.side, "Image side")->capture_default_str();
  bench->add_option("--ratio", b.ratio, "Sampling ratio (0.4 og, 0.25 tv)");
  bench->add_option("--lambda", b.lambda, "Regularization weight");
  bench->add_option("--iterations", b.iterations, "Iterations per solver")->capture_default_str();
  bench->add_option("--seed", b.seed, "Random seed")->capture_default_str();
  bench->add_option("--out", b.out, "Write residual traces as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (solve->parsed()) return run_solve(s);
    return run_bench(b);
  } catch (const firls::InvalidInput& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const firls::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const firls::NumericalBreakdown& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return kExitBreakdown;
  } catch (const firls::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBreakdown;
  }
}
