#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sarsr {

struct Coord {
  int row = 0;
  int col = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

enum class Boundary { reflect, clamp };

/// Grayscale image of finite doubles, row-major.
///
/// Display-domain images live in [0,1]; log-domain images may be negative.
/// Quantization to 8 bits only happens in save_image.
class Image {
 public:
  /// Filled with `fill`. Throws on width or height < 1.
  Image(int width, int height, double fill = 0.0);

  /// Takes ownership of `pixels`; throws if the size does not match or any value
  /// is not finite.
  Image(int width, int height, std::vector<double> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  double operator()(int row, int col) const noexcept {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  double& operator()(int row, int col) noexcept {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  double operator()(Coord c) const noexcept { return (*this)(c.row, c.col); }

  std::span<const double> pixels() const noexcept { return pixels_; }
  std::span<double> pixels() noexcept { return pixels_; }
  std::span<const double> row(int r) const noexcept {
    return std::span<const double>(pixels_).subspan(static_cast<std::size_t>(r) * width_, width_);
  }

  bool contains(Coord c) const noexcept {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> pixels_;
};

/// Maps any integer index onto [0, n). Reflect mirrors without repeating the
/// edge sample (-1 -> 1, n -> n-2).
int map_index(int index, int n, Boundary policy) noexcept;

double sample_with_boundary(const Image& img, int row, int col, Boundary policy) noexcept;

/// Copy of `img` with `margin` extra pixels on every side, filled by `policy`.
Image pad(const Image& img, int margin, Boundary policy);

// -- I/O --------------------------------------------------------------------

/// Reads 8-bit PGM (P2/P5, maxval 255) or, when built with libpng, 8-bit gray PNG.
Image load_image(const std::filesystem::path& path);

/// Writes binary PGM (P5); pixels become round(clamp(v, 0, 1) * 255).
void save_image(const Image& img, const std::filesystem::path& path);

std::vector<unsigned char> quantize_8bit(const Image& img);

// -- resampling --------------------------------------------------------------

enum class DownsampleMode {
  average,   ///< mean of each 2x2 block
  decimate,  ///< top-left pixel of each 2x2 block
};

Image downsample_2x(const Image& img, DownsampleMode mode = DownsampleMode::average);

/// Catmull-Rom (a = -0.5) separable bicubic. Output pixel (2i+di, 2j+dj) sits at
/// source position (i + di/2, j + dj/2), so even output samples reproduce the
/// source grid.
Image bicubic_upscale_2x(const Image& img, Boundary policy = Boundary::reflect);

/// Pixel replication; each source pixel fills its 2x2 child quad.
Image nearest_upscale_2x(const Image& img);

}  // namespace sarsr
