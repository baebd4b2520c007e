#include "sarsr/image.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "sarsr/error.hpp"

#ifdef SARSR_HAVE_PNG
#include <png.h>
#endif

namespace sarsr {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::size_mismatch: return "size mismatch";
    case ErrorKind::odd_dimension: return "odd dimension";
    case ErrorKind::too_small: return "image too small";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::empty_training_set: return "empty training set";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::invalid_argument,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

}  // namespace

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  if (!std::isfinite(fill)) throw Error(ErrorKind::invalid_argument, "fill value is not finite");
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::size_mismatch, "pixel count " + std::to_string(pixels_.size()) +
                                              " does not match " + std::to_string(width) + "x" +
                                              std::to_string(height));
  }
  if (!std::all_of(pixels_.begin(), pixels_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorKind::invalid_argument, "image contains non-finite values");
  }
}

int map_index(int index, int n, Boundary policy) noexcept {
  if (index >= 0 && index < n) return index;
  if (policy == Boundary::clamp || n == 1) return index < 0 ? 0 : n - 1;
  // reflect: period 2(n-1), no edge repetition
  const long long period = 2LL * (n - 1);
  long long m = index % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return static_cast<int>(m);
}

double sample_with_boundary(const Image& img, int row, int col, Boundary policy) noexcept {
  return img(map_index(row, img.height(), policy), map_index(col, img.width(), policy));
}

Image pad(const Image& img, int margin, Boundary policy) {
  const int w = img.width() + 2 * margin;
  const int h = img.height() + 2 * margin;
  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    const int sr = map_index(r - margin, img.height(), policy);
    for (int c = 0; c < w; ++c) {
      out(r, c) = img(sr, map_index(c - margin, img.width(), policy));
    }
  }
  return out;
}

// -- PGM ----------------------------------------------------------------------

namespace {

// Reads the next whitespace-delimited token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int parse_header_int(std::istream& in, const char* what) {
  const std::string tok = next_token(in);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    throw Error(ErrorKind::format, std::string("bad PGM header field: ") + what);
  }
  return std::stoi(tok);
}

Image from_bytes(int width, int height, const std::vector<unsigned char>& bytes) {
  std::vector<double> px(bytes.size());
  std::transform(bytes.begin(), bytes.end(), px.begin(), [](unsigned char b) { return b / 255.0; });
  return Image(width, height, std::move(px));
}

Image load_pgm(std::istream& in) {
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") throw Error(ErrorKind::format, "not a P2/P5 PGM file");
  const int width = parse_header_int(in, "width");
  const int height = parse_header_int(in, "height");
  const int maxval = parse_header_int(in, "maxval");
  if (width < 1 || height < 1) throw Error(ErrorKind::format, "PGM dimensions must be positive");
  if (maxval != 255) {
    throw Error(ErrorKind::format, "unsupported PGM maxval " + std::to_string(maxval) + " (only 255)");
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<unsigned char> bytes(n);
  if (magic == "P5") {
    // exactly one whitespace byte separates maxval from the raster, consumed by next_token
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw Error(ErrorKind::size_mismatch, "PGM payload has " + std::to_string(in.gcount()) +
                                                " bytes, expected " + std::to_string(n));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::string tok = next_token(in);
      if (tok.empty()) {
        throw Error(ErrorKind::size_mismatch, "PGM payload has " + std::to_string(i) +
                                                  " samples, expected " + std::to_string(n));
      }
      int v = 0;
      try {
        v = std::stoi(tok);
      } catch (const std::exception&) {
        throw Error(ErrorKind::format, "bad P2 sample '" + tok + "'");
      }
      if (v < 0 || v > 255) throw Error(ErrorKind::format, "P2 sample out of range: " + tok);
      bytes[i] = static_cast<unsigned char>(v);
    }
  }
  return from_bytes(width, height, bytes);
}

#ifdef SARSR_HAVE_PNG
Image load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw Error(ErrorKind::format, std::string("PNG read failed: ") + image.message);
  }
  const bool gray8 = (image.format & PNG_FORMAT_FLAG_COLOR) == 0 &&
                     (image.format & PNG_FORMAT_FLAG_LINEAR) == 0 &&
                     (image.format & PNG_FORMAT_FLAG_ALPHA) == 0;
  if (!gray8) {
    png_image_free(&image);
    throw Error(ErrorKind::format, "only 8-bit grayscale PNG is supported");
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    throw Error(ErrorKind::format, std::string("PNG decode failed: ") + image.message);
  }
  return from_bytes(static_cast<int>(image.width), static_cast<int>(image.height), bytes);
}
#endif

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::array<char, 8> sig{};
  in.read(sig.data(), sig.size());
  const auto got = in.gcount();
  in.clear();
  in.seekg(0);
  static constexpr std::array<unsigned char, 8> kPngSig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (got == 8 && std::equal(kPngSig.begin(), kPngSig.end(), sig.begin(),
                             [](unsigned char a, char b) { return a == static_cast<unsigned char>(b); })) {
#ifdef SARSR_HAVE_PNG
    return load_png(path);
#else
    throw Error(ErrorKind::format, "PNG support not built in: " + path.string());
#endif
  }
  return load_pgm(in);
}

std::vector<unsigned char> quantize_8bit(const Image& img) {
  std::vector<unsigned char> out(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), out.begin(), [](double v) {
    // round-half-up on the clamped value
    return static_cast<unsigned char>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5));
  });
  return out;
}

void save_image(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  const auto bytes = quantize_8bit(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

// -- resampling ---------------------------------------------------------------

Image downsample_2x(const Image& img, DownsampleMode mode) {
  if (img.width() % 2 != 0 || img.height() % 2 != 0) {
    throw Error(ErrorKind::odd_dimension, "downsample_2x needs even dimensions, got " +
                                              std::to_string(img.width()) + "x" +
                                              std::to_string(img.height()));
  }
  Image out(img.width() / 2, img.height() / 2);
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      if (mode == DownsampleMode::decimate) {
        out(r, c) = img(2 * r, 2 * c);
      } else {
        out(r, c) = 0.25 * (img(2 * r, 2 * c) + img(2 * r, 2 * c + 1) + img(2 * r + 1, 2 * c) +
                            img(2 * r + 1, 2 * c + 1));
      }
    }
  }
  return out;
}

namespace {

// Catmull-Rom taps for the four samples at offsets -1, 0, 1, 2 around fraction t.
std::array<double, 4> catmull_rom(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t),
          0.5 * (t3 - t2)};
}

}  // namespace

Image bicubic_upscale_2x(const Image& img, Boundary policy) {
  if (img.width() < 4 || img.height() < 4) {
    throw Error(ErrorKind::too_small, "bicubic_upscale_2x needs at least 4x4, got " +
                                          std::to_string(img.width()) + "x" +
                                          std::to_string(img.height()));
  }
  const std::array<std::array<double, 4>, 2> taps{catmull_rom(0.0), catmull_rom(0.5)};

  // horizontal pass: height x 2*width
  Image horiz(2 * img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int oc = 0; oc < horiz.width(); ++oc) {
      const int base = oc / 2;
      const auto& k = taps[oc % 2];
      double acc = 0.0;
      for (int t = 0; t < 4; ++t) {
        acc += k[t] * img(r, map_index(base - 1 + t, img.width(), policy));
      }
      horiz(r, oc) = acc;
    }
  }
  Image out(2 * img.width(), 2 * img.height());
  for (int orow = 0; orow < out.height(); ++orow) {
    const int base = orow / 2;
    const auto& k = taps[orow % 2];
    for (int c = 0; c < out.width(); ++c) {
      double acc = 0.0;
      for (int t = 0; t < 4; ++t) {
        acc += k[t] * horiz(map_index(base - 1 + t, img.height(), policy), c);
      }
      out(orow, c) = acc;
    }
  }
  return out;
}

Image nearest_upscale_2x(const Image& img) {
  Image out(2 * img.width(), 2 * img.height());
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) out(r, c) = img(r / 2, c / 2);
  }
  return out;
}

}  // namespace sarsr
