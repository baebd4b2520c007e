#pragma once

#include <array>

#include "sarsr/image.hpp"
#include "sarsr/nlmeans.hpp"

namespace sarsr {

/// Fine-scale children of a parent pixel, row-major: (2i,2j), (2i,2j+1),
/// (2i+1,2j), (2i+1,2j+1).
using ChildQuad = std::array<Coord, 4>;

constexpr ChildQuad child_coords(Coord parent) noexcept {
  const int r = 2 * parent.row;
  const int c = 2 * parent.col;
  return {{{r, c}, {r, c + 1}, {r + 1, c}, {r + 1, c + 1}}};
}

/// An image and its 2x2 block-mean reduction.
struct PyramidPair {
  Image low;
  Image high;

  explicit PyramidPair(Image high_in, DownsampleMode mode = DownsampleMode::average);
};

struct SrOptions {
  /// Compare the patch at x in the input with the patch at candidate y in the
  /// shrunk image. Default compares both patches in the input (patch at 2y).
  bool cross_scale_patches = false;
  DownsampleMode downsample = DownsampleMode::average;
};

/// Candidates (low-scale coordinates) and normalized weights for one input pixel.
struct SrPixelWeights {
  std::vector<Coord> candidates;
  std::vector<double> weights;
  bool fallback = false;  ///< every kernel weight was zero
};

SrPixelWeights sr_weights(const PyramidPair& pyramid, Coord x, const WindowConfig& cfg,
                          const KernelParams& params, const SrOptions& opts = {});

/// 2x super-resolution by cross-scale NL-means: the search runs over the shrunk
/// image, and each candidate y contributes its input-scale child quad to the
/// child quad of x in the output.
Image sr_upscale_2x(const Image& img, const WindowConfig& cfg, const KernelParams& params,
                    const SrOptions& opts = {}, Exec exec = {});

enum class SrMode {
  single_pass,  ///< super-resolve the log image directly
  two_stage,    ///< despeckle at input scale, then super-resolve
};

/// sr_upscale_2x in the log domain, so the same pass despeckles.
Image sr_despeckle_upscale(const Image& img, const WindowConfig& cfg, const KernelParams& params,
                           const LogOffset& off = {}, const SrOptions& opts = {}, Exec exec = {},
                           SrMode mode = SrMode::single_pass);

}  // namespace sarsr
