#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sarsr/image.hpp"

namespace sarsr {

/// Rectangle, top-left anchored.
struct Region {
  int row = 0;
  int col = 0;
  int width = 0;
  int height = 0;

  static Region whole(const Image& img) { return {0, 0, img.width(), img.height()}; }
  friend bool operator==(const Region&, const Region&) = default;
};

enum class VarianceKind { population, sample };

/// 10 log10(1 / MSE) with peak 1. Identical images give +infinity.
double psnr(const Image& test, const Image& reference);

double mse(const Image& test, const Image& reference);

/// mean^2 / variance over the region; nullopt when the region is constant.
std::optional<double> enl(const Image& img, const Region& region,
                          VarianceKind variance = VarianceKind::population);

/// Lowest-variance size x size window (first in row-major order on ties).
Region min_variance_region(const Image& img, int size = 32);

struct MethodMetrics {
  std::string method;
  std::optional<double> psnr_db;  ///< absent for reference-free runs
  std::optional<double> enl;      ///< absent when the region is degenerate
};

struct MetricsReport {
  std::vector<MethodMetrics> rows;
  std::optional<double> clean_enl;
  Region enl_region;

  const MethodMetrics* find(const std::string& method) const;

  /// Columns method,psnr_db,enl; "inf" for infinite PSNR, empty for missing values.
  /// The clean reference appears as a row named "clean".
  std::string to_csv() const;
  std::string to_table() const;
};

}  // namespace sarsr
