#pragma once

// Brute-force reference implementations used only by tests. They re-derive every
// formula from scratch (own boundary mapping, own kernels, no padding, no
// shared helpers) so they stay independent of the optimized paths they check.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "sarsr/image.hpp"
#include "sarsr/nlmeans.hpp"

namespace oracle {

inline int reflect(int i, int n) {
  if (n == 1) return 0;
  // walk back into range one mirror at a time
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

inline double at(const sarsr::Image& img, int r, int c, sarsr::Boundary b) {
  if (b == sarsr::Boundary::reflect) return img(reflect(r, img.height()), reflect(c, img.width()));
  return img(clamp_index(r, img.height()), clamp_index(c, img.width()));
}

inline double distance(const sarsr::Image& a, int ar, int ac, const sarsr::Image& b, int br, int bc,
                       int radius, sarsr::Boundary policy) {
  double s = 0.0;
  int n = 0;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const double d = at(a, ar + dr, ac + dc, policy) - at(b, br + dr, bc + dc, policy);
      s += d * d;
      ++n;
    }
  }
  return s / n;
}

inline double kernel(double d, const sarsr::KernelParams& p) {
  const double pi = std::numbers::pi;
  switch (p.kind) {
    case sarsr::KernelKind::exp: return std::exp(-d / (p.h * p.h));
    case sarsr::KernelKind::cosine: return d <= p.h ? std::cos(pi * d / (2 * p.h)) : 0.0;
    case sarsr::KernelKind::combined: return d <= p.h1 ? std::exp(std::cos(pi * d / (2 * p.h1)) * p.h2) : 0.0;
  }
  return 0.0;
}

/// Quadruple loop NL-means (self weight included, no cap).
inline sarsr::Image denoise(const sarsr::Image& img, const sarsr::WindowConfig& cfg,
                            const sarsr::KernelParams& params) {
  sarsr::Image out(img.width(), img.height());
  const int R = cfg.search_radius;
  for (int i = 0; i < img.height(); ++i) {
    for (int j = 0; j < img.width(); ++j) {
      double z = 0.0;
      double acc = 0.0;
      for (int yr = i - R; yr <= i + R; ++yr) {
        for (int yc = j - R; yc <= j + R; ++yc) {
          if (yr < 0 || yc < 0 || yr >= img.height() || yc >= img.width()) continue;
          const double w = kernel(distance(img, i, j, img, yr, yc, cfg.patch_radius, cfg.boundary), params);
          z += w;
          acc += w * img(yr, yc);
        }
      }
      out(i, j) = z > 0 ? acc / z : img(i, j);
    }
  }
  return out;
}

inline sarsr::Image block_mean(const sarsr::Image& img) {
  sarsr::Image out(img.width() / 2, img.height() / 2);
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      double s = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) s += img(2 * r + a, 2 * c + b);
      }
      out(r, c) = s / 4.0;
    }
  }
  return out;
}

/// Super-resolution written straight from the per-slot weighted sums: for each
/// slot k in {(0,0),(0,1),(1,0),(1,1)}, X_k(x) = sum_y w(x,y) Y_k(y).
inline sarsr::Image sr_upscale(const sarsr::Image& img, const sarsr::WindowConfig& cfg,
                               const sarsr::KernelParams& params, bool cross_scale = false) {
  const sarsr::Image low = block_mean(img);
  sarsr::Image out(2 * img.width(), 2 * img.height());
  const int R = cfg.search_radius;
  for (int i = 0; i < img.height(); ++i) {
    for (int j = 0; j < img.width(); ++j) {
      const int pr = i / 2;
      const int pc = j / 2;
      std::vector<double> w;
      std::vector<std::pair<int, int>> ys;
      for (int yr = pr - R; yr <= pr + R; ++yr) {
        for (int yc = pc - R; yc <= pc + R; ++yc) {
          if (yr < 0 || yc < 0 || yr >= low.height() || yc >= low.width()) continue;
          const double d = cross_scale
                               ? distance(img, i, j, low, yr, yc, cfg.patch_radius, cfg.boundary)
                               : distance(img, i, j, img, 2 * yr, 2 * yc, cfg.patch_radius, cfg.boundary);
          w.push_back(kernel(d, params));
          ys.emplace_back(yr, yc);
        }
      }
      double z = 0.0;
      for (double v : w) z += v;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          double acc = 0.0;
          if (z > 0) {
            for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] / z * img(2 * ys[k].first + a, 2 * ys[k].second + b);
          } else {
            acc = img(2 * pr + a, 2 * pc + b);
          }
          out(2 * i + a, 2 * j + b) = acc;
        }
      }
    }
  }
  return out;
}

inline sarsr::Image random_image(int width, int height, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> px(static_cast<std::size_t>(width) * height);
  for (double& v : px) v = dist(rng);
  return sarsr::Image(width, height, std::move(px));
}

}  // namespace oracle
