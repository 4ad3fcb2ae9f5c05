#include "firls/harness/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace firls::harness {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int ch = 0;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

}  // namespace

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path);
  if (pgm_token(in) != "P5") throw IoError("not a binary PGM (P5): " + path);
  Index width = 0;
  Index height = 0;
  int maxval = 0;
  try {
    width = std::stol(pgm_token(in));
    height = std::stol(pgm_token(in));
    maxval = std::stoi(pgm_token(in));
  } catch (const std::exception&) {
    throw IoError("malformed PGM header: " + path);
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw IoError("unsupported PGM geometry or depth: " + path);
  }
  std::vector<unsigned char> raw(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError("truncated PGM data: " + path);

  Image img;
  img.height = height;
  img.width = width;
  img.pixels.resize(width * height);
  for (Index r = 0; r < height; ++r) {
    for (Index c = 0; c < width; ++c) {
      img.pixels[r + c * height] = static_cast<double>(raw[static_cast<std::size_t>(r * width + c)]) / maxval;
    }
  }
  return img;
}

PgmScale write_pgm(const std::string& path, const Image& image) {
  detail::require(image.height > 0 && image.width > 0, "image must be non-empty");
  detail::require_size(image.pixels.size(), image.height * image.width, "image pixels");
  PgmScale scale{image.pixels.minCoeff(), image.pixels.maxCoeff()};
  const double span = scale.max - scale.min;
  std::vector<unsigned char> raw(static_cast<std::size_t>(image.height * image.width), 0);
  for (Index r = 0; r < image.height; ++r) {
    for (Index c = 0; c < image.width; ++c) {
      const double v = span > 0 ? (image.pixels[r + c * image.height] - scale.min) / span : 0.0;
      raw[static_cast<std::size_t>(r * image.width + c)] =
          static_cast<unsigned char>(std::clamp(std::lround(v * 255.0), 0L, 255L));
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image: " + path);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("failed writing image: " + path);
  return scale;
}

void write_mask(const std::string& path, const MaskFile& mask) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mask: " + path);
  out << "# n=" << mask.n << " ratio=" << format_number(mask.ratio) << " seed=" << mask.seed << '\n';
  for (Index i : mask.indices) out << i << '\n';
  if (!out) throw IoError("failed writing mask: " + path);
}

MaskFile read_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mask: " + path);
  MaskFile mask;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw IoError("mask header missing: " + path);
  {
    std::istringstream header(line.substr(2));
    std::string field;
    bool have_n = false;
    while (header >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      try {
        if (key == "n") {
          mask.n = std::stol(value);
          have_n = true;
        } else if (key == "ratio") {
          mask.ratio = std::stod(value);
        } else if (key == "seed") {
          mask.seed = std::stoull(value);
        }
      } catch (const std::exception&) {
        throw IoError("malformed mask header: " + path);
      }
    }
    if (!have_n) throw IoError("mask header lacks n: " + path);
  }
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      mask.indices.push_back(std::stol(line));
    } catch (const std::exception&) {
      throw IoError("malformed mask index '" + line + "' in " + path);
    }
  }
  return mask;
}

void write_trace_csv(const std::string& path, const std::vector<std::string>& header,
                     const SolveReport<double>& report, bool with_timing) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace: " + path);
  for (const auto& line : header) out << "# " << line << '\n';
  out << "iter,objective,mse,snr_db,pcg_iters,elapsed_ms\n";
  for (const auto& r : report.records) {
    out << r.iteration << ',' << format_number(r.objective) << ',' << format_number(r.mse) << ','
        << format_number(r.snr_db) << ',' << r.pcg_iterations << ','
        << (with_timing ? format_number(r.elapsed_ms) : std::string("0")) << '\n';
  }
  if (!out) throw IoError("failed writing trace: " + path);
}

Image center_crop_square(const Image& image) {
  const Index side = std::min(image.height, image.width);
  const Index r0 = (image.height - side) / 2;
  const Index c0 = (image.width - side) / 2;
  Image out;
  out.height = side;
  out.width = side;
  out.pixels.resize(side * side);
  for (Index c = 0; c < side; ++c) {
    for (Index r = 0; r < side; ++r) out.pixels[r + c * side] = image.pixels[(r0 + r) + (c0 + c) * image.height];
  }
  return out;
}

}  // namespace firls::harness
