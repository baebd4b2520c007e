#pragma once

#include <cstdint>

#include "sarsr/image.hpp"

namespace sarsr {

enum class NoiseDistribution {
  uniform,   ///< n ~ U[-sigma*sqrt(3), sigma*sqrt(3)]
  gaussian,  ///< n ~ N(0, sigma^2)
};

struct SpeckleParams {
  double sigma = 0.2;
  std::uint64_t seed = 0;
  NoiseDistribution distribution = NoiseDistribution::uniform;
  /// Draws with 1 + n <= min_factor are rejected and re-drawn so log(1 + n) stays defined.
  double min_factor = 1e-4;
};

struct LogOffset {
  double epsilon = 1e-4;
};

void validate(const SpeckleParams& params);
void validate(const LogOffset& off);

/// J = I * (1 + n), one independent n per pixel in row-major order. Not clamped.
Image add_speckle(const Image& img, const SpeckleParams& params);

/// ln(v + epsilon). Throws on negative pixels.
Image to_log_domain(const Image& img, const LogOffset& off = {});

/// exp(v) - epsilon.
Image from_log_domain(const Image& img, const LogOffset& off = {});

}  // namespace sarsr
