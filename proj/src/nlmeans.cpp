#include "sarsr/nlmeans.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sarsr/error.hpp"

namespace sarsr {

void validate(const WindowConfig& cfg) {
  if (cfg.patch_radius < 0 || cfg.search_radius < 0) {
    throw Error(ErrorKind::invalid_argument, "window radii must be non-negative");
  }
}

void validate(const KernelParams& params) {
  if (!(params.h > 0.0) || !(params.h1 > 0.0) || !(params.h2 > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "kernel parameters h, h1, h2 must be positive");
  }
}

PatchDistance patch_distance(const Image& img_a, Coord center_a, const Image& img_b, Coord center_b,
                             const WindowConfig& cfg) {
  const int r = cfg.patch_radius;
  double sum = 0.0;
  for (int dr = -r; dr <= r; ++dr) {
    for (int dc = -r; dc <= r; ++dc) {
      const double a = sample_with_boundary(img_a, center_a.row + dr, center_a.col + dc, cfg.boundary);
      const double b = sample_with_boundary(img_b, center_b.row + dr, center_b.col + dc, cfg.boundary);
      sum += (a - b) * (a - b);
    }
  }
  const double side = 2.0 * r + 1.0;
  return {sum / (side * side)};
}

double kernel_weight(PatchDistance d, const KernelParams& params) {
  switch (params.kind) {
    case KernelKind::exp:
      return std::exp(-d.value / (params.h * params.h));
    case KernelKind::cosine:
      return d.value <= params.h ? std::cos(std::numbers::pi * d.value / (2.0 * params.h)) : 0.0;
    case KernelKind::combined:
      return d.value <= params.h1
                 ? std::exp(std::cos(std::numbers::pi * d.value / (2.0 * params.h1)) * params.h2)
                 : 0.0;
  }
  return 0.0;
}

std::vector<double> normalized_weights(std::span<const double> distances, const KernelParams& params,
                                       int self_index, bool cap_self, int fallback_index,
                                       bool* fell_back) {
  std::vector<double> w(distances.size());
  // The exp kernel is shift-invariant after normalization; measuring from the
  // smallest distance keeps it from underflowing to all zeros.
  double shift = 0.0;
  if (params.kind == KernelKind::exp && !distances.empty()) {
    shift = *std::min_element(distances.begin(), distances.end());
  }
  for (std::size_t k = 0; k < distances.size(); ++k) {
    w[k] = kernel_weight({distances[k] - shift}, params);
  }
  if (cap_self && self_index >= 0) {
    double best = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (static_cast<int>(k) != self_index) best = std::max(best, w[k]);
    }
    w[self_index] = best;
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (fell_back) *fell_back = !(total > 0.0);
  if (total > 0.0) {
    for (double& v : w) v /= total;
  } else {
    std::fill(w.begin(), w.end(), 0.0);
    w[fallback_index] = 1.0;
  }
  return w;
}

namespace {

void check_denoise_input(const Image& img, const WindowConfig& cfg, const KernelParams& params) {
  validate(cfg);
  validate(params);
  const int side = 2 * cfg.patch_radius + 1;
  if (img.width() < side || img.height() < side) {
    throw Error(ErrorKind::too_small, "image " + std::to_string(img.width()) + "x" +
                                          std::to_string(img.height()) + " is smaller than the " +
                                          std::to_string(side) + "x" + std::to_string(side) + " patch");
  }
}

struct SearchRange {
  int r0, r1, c0, c1;  // inclusive
};

SearchRange search_range(Coord center, int radius, int height, int width) {
  return {std::max(0, center.row - radius), std::min(height - 1, center.row + radius),
          std::max(0, center.col - radius), std::min(width - 1, center.col + radius)};
}

}  // namespace

PixelWeights denoise_weights(const Image& img, Coord x, const WindowConfig& cfg,
                             const KernelParams& params) {
  check_denoise_input(img, cfg, params);
  PixelWeights out;
  std::vector<double> dist;
  int self = -1;
  const auto range = search_range(x, cfg.search_radius, img.height(), img.width());
  for (int r = range.r0; r <= range.r1; ++r) {
    for (int c = range.c0; c <= range.c1; ++c) {
      if (r == x.row && c == x.col) self = static_cast<int>(out.candidates.size());
      out.candidates.push_back({r, c});
      dist.push_back(patch_distance(img, x, img, {r, c}, cfg).value);
    }
  }
  out.weights = normalized_weights(dist, params, self, cfg.cap_self_weight, self, &out.fallback);
  return out;
}

Image denoise(const Image& img, const WindowConfig& cfg, const KernelParams& params, Exec exec) {
  check_denoise_input(img, cfg, params);
  const int r = cfg.patch_radius;
  const int side = 2 * r + 1;
  const double inv_area = 1.0 / (static_cast<double>(side) * side);
  const Image padded = pad(img, r, cfg.boundary);
  const int pw = padded.width();
  const auto px = padded.pixels();
  Image out(img.width(), img.height());

  parallel_rows(img.height(), exec, [&](int row_begin, int row_end) {
    const int max_candidates = (2 * cfg.search_radius + 1) * (2 * cfg.search_radius + 1);
    std::vector<double> dist;
    std::vector<double> value;
    dist.reserve(max_candidates);
    value.reserve(max_candidates);
    for (int i = row_begin; i < row_end; ++i) {
      for (int j = 0; j < img.width(); ++j) {
        dist.clear();
        value.clear();
        int self = -1;
        const auto range = search_range({i, j}, cfg.search_radius, img.height(), img.width());
        for (int yr = range.r0; yr <= range.r1; ++yr) {
          for (int yc = range.c0; yc <= range.c1; ++yc) {
            if (yr == i && yc == j) self = static_cast<int>(dist.size());
            // padded (row, col) of the patch's top-left corner equals the centre
            // in image coordinates
            double sum = 0.0;
            for (int dr = 0; dr < side; ++dr) {
              const double* a = px.data() + static_cast<std::size_t>(i + dr) * pw + j;
              const double* b = px.data() + static_cast<std::size_t>(yr + dr) * pw + yc;
              for (int dc = 0; dc < side; ++dc) {
                const double diff = a[dc] - b[dc];
                sum += diff * diff;
              }
            }
            dist.push_back(sum * inv_area);
            value.push_back(img(yr, yc));
          }
        }
        const auto w = normalized_weights(dist, params, self, cfg.cap_self_weight, self);
        double acc = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * value[k];
        out(i, j) = acc;
      }
    }
  });
  return out;
}

Image despeckle(const Image& img, const WindowConfig& cfg, const KernelParams& params,
                const LogOffset& off, Exec exec) {
  return from_log_domain(denoise(to_log_domain(img, off), cfg, params, exec), off);
}

}  // namespace sarsr
