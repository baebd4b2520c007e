#include "sarsr/sr_upscale.hpp"

#include <algorithm>
#include <string>

#include "sarsr/error.hpp"

namespace sarsr {

PyramidPair::PyramidPair(Image high_in, DownsampleMode mode)
    : low(downsample_2x(high_in, mode)), high(std::move(high_in)) {}

namespace {

void check_sr_input(const Image& img, const WindowConfig& cfg, const KernelParams& params) {
  validate(cfg);
  validate(params);
  if (img.width() % 2 != 0 || img.height() % 2 != 0) {
    throw Error(ErrorKind::odd_dimension, "sr_upscale_2x needs even dimensions, got " +
                                              std::to_string(img.width()) + "x" +
                                              std::to_string(img.height()));
  }
  const int min_side = 2 * (2 * cfg.patch_radius + 1);
  if (img.width() < min_side || img.height() < min_side) {
    throw Error(ErrorKind::too_small, "sr_upscale_2x needs at least " + std::to_string(min_side) +
                                          "x" + std::to_string(min_side) + ", got " +
                                          std::to_string(img.width()) + "x" +
                                          std::to_string(img.height()));
  }
}

// Shared per-pixel geometry: which low-scale candidates a pixel sees, which one
// is the pixel itself under the default geometry, and which one is the fallback.
struct Candidates {
  int r0, r1, c0, c1;
  int self = -1;
  int centre = 0;
};

Candidates candidates_for(Coord x, const Image& low, int radius, bool cross_scale) {
  const Coord parent{x.row / 2, x.col / 2};
  Candidates cand{std::max(0, parent.row - radius), std::min(low.height() - 1, parent.row + radius),
                  std::max(0, parent.col - radius), std::min(low.width() - 1, parent.col + radius)};
  const int cols = cand.c1 - cand.c0 + 1;
  cand.centre = (parent.row - cand.r0) * cols + (parent.col - cand.c0);
  if (!cross_scale && x.row % 2 == 0 && x.col % 2 == 0) cand.self = cand.centre;
  return cand;
}

}  // namespace

SrPixelWeights sr_weights(const PyramidPair& pyramid, Coord x, const WindowConfig& cfg,
                          const KernelParams& params, const SrOptions& opts) {
  check_sr_input(pyramid.high, cfg, params);
  const auto cand = candidates_for(x, pyramid.low, cfg.search_radius, opts.cross_scale_patches);
  SrPixelWeights out;
  std::vector<double> dist;
  for (int yr = cand.r0; yr <= cand.r1; ++yr) {
    for (int yc = cand.c0; yc <= cand.c1; ++yc) {
      out.candidates.push_back({yr, yc});
      dist.push_back(opts.cross_scale_patches
                         ? patch_distance(pyramid.high, x, pyramid.low, {yr, yc}, cfg).value
                         : patch_distance(pyramid.high, x, pyramid.high, {2 * yr, 2 * yc}, cfg).value);
    }
  }
  out.weights = normalized_weights(dist, params, cand.self, cfg.cap_self_weight, cand.centre, &out.fallback);
  return out;
}

Image sr_upscale_2x(const Image& img, const WindowConfig& cfg, const KernelParams& params,
                    const SrOptions& opts, Exec exec) {
  check_sr_input(img, cfg, params);
  const Image low = downsample_2x(img, opts.downsample);
  const int r = cfg.patch_radius;
  const int side = 2 * r + 1;
  const double inv_area = 1.0 / (static_cast<double>(side) * side);
  const Image padded = pad(img, r, cfg.boundary);
  const Image padded_low = pad(low, r, cfg.boundary);
  const Image& ref = opts.cross_scale_patches ? padded_low : padded;
  const int pw = padded.width();
  const int rw = ref.width();
  // candidate y maps to this top-left corner in `ref`
  const int scale = opts.cross_scale_patches ? 1 : 2;
  Image out(2 * img.width(), 2 * img.height());

  parallel_rows(img.height(), exec, [&](int row_begin, int row_end) {
    std::vector<double> dist;
    std::vector<Coord> ys;
    for (int i = row_begin; i < row_end; ++i) {
      for (int j = 0; j < img.width(); ++j) {
        const auto cand = candidates_for({i, j}, low, cfg.search_radius, opts.cross_scale_patches);
        dist.clear();
        ys.clear();
        for (int yr = cand.r0; yr <= cand.r1; ++yr) {
          for (int yc = cand.c0; yc <= cand.c1; ++yc) {
            double sum = 0.0;
            for (int dr = 0; dr < side; ++dr) {
              const double* a = padded.pixels().data() + static_cast<std::size_t>(i + dr) * pw + j;
              const double* b =
                  ref.pixels().data() + static_cast<std::size_t>(scale * yr + dr) * rw + scale * yc;
              for (int dc = 0; dc < side; ++dc) {
                const double diff = a[dc] - b[dc];
                sum += diff * diff;
              }
            }
            dist.push_back(sum * inv_area);
            ys.push_back({yr, yc});
          }
        }
        const auto w = normalized_weights(dist, params, cand.self, cfg.cap_self_weight, cand.centre);
        std::array<double, 4> acc{};
        for (std::size_t k = 0; k < w.size(); ++k) {
          const auto quad = child_coords(ys[k]);
          for (int q = 0; q < 4; ++q) acc[q] += w[k] * img(quad[q]);
        }
        const auto target = child_coords({i, j});
        for (int q = 0; q < 4; ++q) out(target[q].row, target[q].col) = acc[q];
      }
    }
  });
  return out;
}

Image sr_despeckle_upscale(const Image& img, const WindowConfig& cfg, const KernelParams& params,
                           const LogOffset& off, const SrOptions& opts, Exec exec, SrMode mode) {
  Image log_img = to_log_domain(img, off);
  if (mode == SrMode::two_stage) log_img = denoise(log_img, cfg, params, exec);
  return from_log_domain(sr_upscale_2x(log_img, cfg, params, opts, exec), off);
}

}  // namespace sarsr
