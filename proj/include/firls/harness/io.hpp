#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "firls/core.hpp"
#include "firls/metrics.hpp"

namespace firls::harness {

/// Grayscale image stored column-major.
struct Image {
  Index height = 0;
  Index width = 0;
  Vector<double> pixels;
};

/// Reads an 8-bit binary PGM (P5), scaled to [0, 1].
Image read_pgm(const std::string& path);

struct PgmScale {
  double min = 0.0;
  double max = 0.0;
};

/// Writes an 8-bit binary PGM after min-max scaling to [0, 255].
PgmScale write_pgm(const std::string& path, const Image& image);

/// Sampling mask file: "# n=<n> ratio=<r> seed=<s>" then one index per line.
struct MaskFile {
  Index n = 0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::vector<Index> indices;
};

void write_mask(const std::string& path, const MaskFile& mask);
MaskFile read_mask(const std::string& path);

/// Trace CSV: '#' header lines, then iter,objective,mse,snr_db,pcg_iters,elapsed_ms.
void write_trace_csv(const std::string& path, const std::vector<std::string>& header,
                     const SolveReport<double>& report, bool with_timing = true);

/// Center crop to the largest square.
Image center_crop_square(const Image& image);

}  // namespace firls::harness
