#include "firls/harness/experiment.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "firls/firls_og.hpp"
#include "firls/firls_tv.hpp"
#include "firls/groups.hpp"
#include "firls/harness/generators.hpp"
#include "firls/harness/io.hpp"
#include "firls/measurement.hpp"

namespace firls::harness {

ProblemKind parse_problem(const std::string& name) {
  if (name == "l1") return ProblemKind::l1;
  if (name == "og") return ProblemKind::og;
  if (name == "tree") return ProblemKind::tree;
  if (name == "mt") return ProblemKind::mt;
  if (name == "tv") return ProblemKind::tv;
  throw InvalidInput("unknown problem kind: " + name);
}

SamplingKind parse_sampling(const std::string& name) {
  if (name == "fourier") return SamplingKind::fourier;
  if (name == "gaussian") return SamplingKind::gaussian;
  if (name == "select") return SamplingKind::select;
  throw InvalidInput("unknown sampling kind: " + name);
}

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::l1: return "l1";
    case ProblemKind::og: return "og";
    case ProblemKind::tree: return "tree";
    case ProblemKind::mt: return "mt";
    case ProblemKind::tv: return "tv";
  }
  return "?";
}

const char* to_string(SamplingKind kind) {
  switch (kind) {
    case SamplingKind::fourier: return "fourier";
    case SamplingKind::gaussian: return "gaussian";
    case SamplingKind::select: return "select";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  detail::require(ratio > 0.0 && ratio <= 1.0, "ratio must lie in (0, 1]");
  detail::require(!(image_path && signal), "choose either an input image or a synthetic signal");
  detail::require(!(problem == ProblemKind::tv && signal), "tv reconstruction needs an image");
  if (signal) {
    detail::require(signal->length > 0, "signal length must be positive");
    detail::require(signal->sparsity >= 0 && signal->sparsity <= signal->length, "signal sparsity must lie in [0, N]");
    detail::require(!out_image, "--out-image needs an image problem");
  }
  detail::require(!lambda || *lambda > 0.0, "lambda must be positive");
  detail::require(epsilon > 0.0, "epsilon must be positive");
  detail::require(outer_iterations >= 1, "outer iterations must be positive");
  detail::require(pcg_iterations >= 1, "PCG iterations must be positive");
  detail::require(pcg_tolerance > 0.0 && pcg_tolerance < 1.0, "PCG tolerance must lie in (0, 1)");
  detail::require(channels >= 1, "channel count must be positive");
  detail::require(levels >= 0, "wavelet levels must be non-negative");
  detail::require(phantom_side >= 16, "phantom side must be at least 16");
  detail::require(!(mask_path && sampling == SamplingKind::gaussian), "a mask file needs fourier or select sampling");
}

namespace {

using Op = MeasurementOperator<double>;

struct Truth {
  Vector<double> base;  // one channel
  Index height = 0;
  Index width = 1;
  bool image = false;
};

Truth load_truth(const ExperimentConfig& cfg, std::vector<std::string>& warnings) {
  Truth t;
  if (cfg.signal) {
    t.height = cfg.signal->length;
    t.width = 1;
    return t;  // generated per channel later
  }
  Image img;
  if (cfg.image_path) {
    img = read_pgm(*cfg.image_path);
  } else {
    img.height = img.width = cfg.phantom_side;
    img.pixels = gen_shepp_logan(cfg.phantom_side);
  }
  if (img.height != img.width) {
    warnings.push_back("input image is " + std::to_string(img.height) + "x" + std::to_string(img.width) +
                       "; center-cropped to a square");
    img = center_crop_square(img);
  }
  t.base = img.pixels;
  t.height = img.height;
  t.width = img.width;
  t.image = true;
  return t;
}

std::shared_ptr<const Op> build_operator(const ExperimentConfig& cfg, const Truth& t, std::vector<Index>& samples) {
  const Index n = t.height * t.width;
  const std::uint64_t op_seed = cfg.seed * 2654435761ULL + 17ULL;
  if (cfg.sampling == SamplingKind::gaussian) {
    const auto m = std::max<Index>(1, static_cast<Index>(std::llround(cfg.ratio * static_cast<double>(n))));
    return std::make_shared<const Op>(Op::gaussian(m, n, op_seed));
  }
  if (cfg.mask_path) {
    MaskFile mask = read_mask(*cfg.mask_path);
    const Index expected = t.image ? t.height : n;
    if (mask.n != expected) {
      throw InvalidInput("mask n=" + std::to_string(mask.n) + " does not match problem size " + std::to_string(expected));
    }
    samples = std::move(mask.indices);
  } else if (cfg.sampling == SamplingKind::fourier) {
    samples = t.image ? gen_fourier_mask(t.height, cfg.ratio, op_seed) : gen_fourier_mask_1d(n, cfg.ratio, op_seed);
  } else {
    const auto m = std::max<Index>(1, static_cast<Index>(std::llround(cfg.ratio * static_cast<double>(n))));
    samples = gen_random_subset(n, m, op_seed);
  }
  if (cfg.sampling == SamplingKind::fourier) {
    return std::make_shared<const Op>(Op::partial_fourier(t.height, t.width, samples));
  }
  return std::make_shared<const Op>(Op::selection(n, samples));
}

OrthogonalTransform<double> build_transform(const ExperimentConfig& cfg, const Truth& t) {
  const bool sparse_domain = !t.image && cfg.problem != ProblemKind::tree;
  if (sparse_domain || cfg.wavelet == WaveletKind::identity) {
    return OrthogonalTransform<double>::identity(t.height * t.width);
  }
  const int max_levels = OrthogonalTransform<double>::max_levels(t.height, t.width);
  const int levels = cfg.levels > 0 ? cfg.levels : std::min(4, max_levels);
  return OrthogonalTransform<double>::wavelet_2d(cfg.wavelet, t.height, t.width, levels);
}

GroupConfig build_groups(const ExperimentConfig& cfg, const OrthogonalTransform<double>& phi, Index channels) {
  const Index n = phi.size();
  switch (cfg.problem) {
    case ProblemKind::l1: return GroupConfig::singletons(n);
    case ProblemKind::og: return GroupConfig::chained_pairs(n);
    case ProblemKind::tree: return GroupConfig::tree(phi);
    case ProblemKind::mt: return GroupConfig::joint(n, channels);
    case ProblemKind::tv: break;
  }
  throw InvalidInput("no group configuration for tv");
}

std::string format_double(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  Truth t = load_truth(cfg, result.warnings);
  result.height = t.height;
  result.width = t.width;
  const Index n = t.height * t.width;
  const Index channels = cfg.problem == ProblemKind::mt ? cfg.channels : 1;

  if (cfg.signal) {
    result.truth = channels > 1 ? gen_joint_sparse_signal(n, cfg.signal->sparsity, channels, cfg.seed)
                                : gen_sparse_signal(n, cfg.signal->sparsity, cfg.seed);
  } else {
    result.truth.resize(n * channels);
    for (Index c = 0; c < channels; ++c) {
      result.truth.segment(c * n, n) = t.base.array().pow(1.0 + 0.5 * static_cast<double>(c)).matrix();
    }
  }

  std::vector<Index> samples;
  auto op = build_operator(cfg, t, samples);
  const Index m = op->rows();
  ComplexVector<double> b(m * channels);
  Vector<double> atb(n * channels);
  for (Index c = 0; c < channels; ++c) {
    b.segment(c * m, m) = op->forward(result.truth.segment(c * n, n));
    atb.segment(c * n, n) = op->adjoint(b.segment(c * m, m));
  }
  result.zero_filled = atb;
  if (population_variance(result.truth) > 0.0) result.zero_filled_snr_db = snr(result.truth, atb);
  result.lambda = cfg.lambda ? *cfg.lambda : 0.01 * atb.cwiseAbs().maxCoeff();
  detail::require(result.lambda > 0.0, "default lambda is zero because A^T b vanishes; pass --lambda");

  SolveOptions<double> opts;
  opts.outer_iterations = cfg.outer_iterations;
  opts.outer_tolerance = cfg.outer_tolerance;
  opts.pcg.max_iterations = cfg.pcg_iterations;
  opts.pcg.relative_residual_tolerance = cfg.pcg_tolerance;
  opts.truth = result.truth;
  opts.on_iterate = cfg.on_iterate;

  if (cfg.problem == ProblemKind::tv) {
    TvProblem<double> p{op, b, t.height, result.lambda, cfg.epsilon, cfg.tv_variant};
    result.report = firls_tv_solve(p, opts);
  } else {
    auto phi = build_transform(cfg, t);
    auto groups = build_groups(cfg, phi, channels);
    OgProblem<double> p{op, b, phi, groups, result.lambda, cfg.epsilon, channels};
    result.report = firls_og_solve(p, opts);
  }

  std::ostringstream config;
  config << "config: problem=" << to_string(cfg.problem) << " sampling=" << to_string(cfg.sampling)
         << " ratio=" << format_double(cfg.ratio) << " lambda=" << format_double(result.lambda)
         << " epsilon=" << format_double(cfg.epsilon) << " outer=" << cfg.outer_iterations
         << " pcg_iters=" << cfg.pcg_iterations << " pcg_tol=" << format_double(cfg.pcg_tolerance)
         << " seed=" << cfg.seed;
  if (cfg.signal) {
    config << " signal=" << cfg.signal->length << "," << cfg.signal->sparsity;
  } else {
    config << " image=" << (cfg.image_path ? *cfg.image_path : std::string("phantom")) << " size=" << t.height
           << "x" << t.width;
  }
  if (cfg.problem == ProblemKind::mt) config << " channels=" << channels;
  if (cfg.problem == ProblemKind::tv) config << " variant=" << firls::to_string(cfg.tv_variant);
  result.header.push_back(config.str());
  result.header.push_back(std::string("variance: ") + kVarianceConvention);
  result.header.push_back("zero_filled_snr_db: " + format_double(result.zero_filled_snr_db));
  result.header.push_back(std::string("status: ") + (result.report.monotone ? "ok" : "FAILED objective increased"));

  if (cfg.out_image) {
    Image out;
    out.height = t.height;
    out.width = t.width;
    out.pixels = result.report.solution.head(n);
    const PgmScale scale = write_pgm(*cfg.out_image, out);
    result.header.push_back("image_scale: min=" + format_double(scale.min) + " max=" + format_double(scale.max));
  }
  if (cfg.out_mask) {
    if (samples.empty()) {
      result.warnings.push_back("gaussian sampling has no index mask; --out-mask ignored");
    } else {
      MaskFile mask{t.image ? t.height : n, cfg.ratio, cfg.seed, samples};
      write_mask(*cfg.out_mask, mask);
    }
  }
  if (cfg.out_trace) write_trace_csv(*cfg.out_trace, result.header, result.report, cfg.record_timing);
  return result;
}

}  // namespace firls::harness
