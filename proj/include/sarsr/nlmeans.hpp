#pragma once

#include <span>
#include <vector>

#include "sarsr/image.hpp"
#include "sarsr/parallel.hpp"
#include "sarsr/speckle.hpp"

namespace sarsr {

/// Patch geometry shared by the denoiser and the super-resolver.
struct WindowConfig {
  int patch_radius = 3;    ///< neighborhood window is (2r+1)^2
  int search_radius = 10;  ///< search window is (2R+1)^2, clipped to the image
  Boundary boundary = Boundary::reflect;
  /// Classic NL-means variant: the centre pixel gets the largest weight among the
  /// other candidates instead of its own d = 0 weight.
  bool cap_self_weight = false;
};

enum class KernelKind {
  exp,       ///< exp(-d / h^2)
  cosine,    ///< cos(pi d / 2h) on [0, h], else 0
  combined,  ///< exp(h2 cos(pi d / 2h1)) on [0, h1], else 0
};

/// Smoothing parameters. Distances are per-pixel means over the patch, so h
/// values taken from sum-of-squares formulations must be divided by (2r+1)^2.
struct KernelParams {
  KernelKind kind = KernelKind::combined;
  double h = 0.2;
  double h1 = 0.2;
  double h2 = 4.0;
};

/// Mean squared difference between two patches (boundary policy applied).
struct PatchDistance {
  double value = 0.0;
};

void validate(const WindowConfig& cfg);
void validate(const KernelParams& params);

PatchDistance patch_distance(const Image& img_a, Coord center_a, const Image& img_b, Coord center_b,
                             const WindowConfig& cfg);

/// Unnormalized weight for a patch distance.
double kernel_weight(PatchDistance d, const KernelParams& params);

/// Turns candidate distances into weights summing to 1.
///
/// `self_index` marks the candidate that is the target pixel itself (-1 if none);
/// with `cap_self` its weight is replaced by the maximum of the others. When every
/// weight is zero the result is one-hot at `fallback_index`.
std::vector<double> normalized_weights(std::span<const double> distances, const KernelParams& params,
                                       int self_index, bool cap_self, int fallback_index,
                                       bool* fell_back = nullptr);

/// Candidates and normalized weights the denoiser uses for one pixel.
struct PixelWeights {
  std::vector<Coord> candidates;
  std::vector<double> weights;
  bool fallback = false;  ///< every kernel weight was zero
};

PixelWeights denoise_weights(const Image& img, Coord x, const WindowConfig& cfg,
                             const KernelParams& params);

/// NL-means: each pixel becomes the weighted mean of its search-window candidates.
Image denoise(const Image& img, const WindowConfig& cfg, const KernelParams& params, Exec exec = {});

/// NL-means on the log image, mapped back with exp.
Image despeckle(const Image& img, const WindowConfig& cfg, const KernelParams& params,
                const LogOffset& off = {}, Exec exec = {});

}  // namespace sarsr
