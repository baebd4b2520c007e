#include "sarsr/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sarsr/error.hpp"

namespace sarsr {

double mse(const Image& test, const Image& reference) {
  if (test.width() != reference.width() || test.height() != reference.height()) {
    throw Error(ErrorKind::dimension_mismatch,
                "image sizes differ: " + std::to_string(test.width()) + "x" +
                    std::to_string(test.height()) + " vs " + std::to_string(reference.width()) + "x" +
                    std::to_string(reference.height()));
  }
  const auto a = test.pixels();
  const auto b = reference.pixels();
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return sum / static_cast<double>(a.size());
}

double psnr(const Image& test, const Image& reference) {
  const double m = mse(test, reference);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

std::optional<double> enl(const Image& img, const Region& region, VarianceKind variance) {
  const long long area = static_cast<long long>(region.width) * region.height;
  if (region.row < 0 || region.col < 0 || region.width < 1 || region.height < 1 ||
      region.row + region.height > img.height() || region.col + region.width > img.width() || area < 2) {
    throw Error(ErrorKind::invalid_argument, "ENL region does not fit the image or has area < 2");
  }
  double sum = 0.0;
  bool constant = true;
  const double first = img(region.row, region.col);
  for (int r = region.row; r < region.row + region.height; ++r) {
    for (int c = region.col; c < region.col + region.width; ++c) {
      sum += img(r, c);
      constant = constant && img(r, c) == first;
    }
  }
  if (constant) return std::nullopt;
  const double mean = sum / static_cast<double>(area);
  double ss = 0.0;
  for (int r = region.row; r < region.row + region.height; ++r) {
    for (int c = region.col; c < region.col + region.width; ++c) ss += (img(r, c) - mean) * (img(r, c) - mean);
  }
  const double var = ss / static_cast<double>(variance == VarianceKind::population ? area : area - 1);
  if (var == 0.0) return std::nullopt;
  return mean * mean / var;
}

Region min_variance_region(const Image& img, int size) {
  if (size < 1 || size > img.width() || size > img.height()) {
    throw Error(ErrorKind::invalid_argument, "ENL window " + std::to_string(size) + " does not fit the image");
  }
  Region best{0, 0, size, size};
  double best_var = std::numeric_limits<double>::infinity();
  for (int r = 0; r + size <= img.height(); ++r) {
    for (int c = 0; c + size <= img.width(); ++c) {
      double s = 0.0;
      double s2 = 0.0;
      for (int rr = r; rr < r + size; ++rr) {
        for (int cc = c; cc < c + size; ++cc) {
          s += img(rr, cc);
          s2 += img(rr, cc) * img(rr, cc);
        }
      }
      const double n = static_cast<double>(size) * size;
      const double var = s2 / n - (s / n) * (s / n);
      if (var < best_var) {
        best_var = var;
        best = {r, c, size, size};
      }
    }
  }
  return best;
}

const MethodMetrics* MetricsReport::find(const std::string& method) const {
  for (const auto& row : rows) {
    if (row.method == method) return &row;
  }
  return nullptr;
}

namespace {

std::string fmt_value(const std::optional<double>& v) {
  if (!v) return "";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

std::string MetricsReport::to_csv() const {
  std::ostringstream out;
  out << "method,psnr_db,enl\n";
  for (const auto& row : rows) out << row.method << ',' << fmt_value(row.psnr_db) << ',' << fmt_value(row.enl) << '\n';
  out << "clean," << fmt_value(std::numeric_limits<double>::infinity()) << ',' << fmt_value(clean_enl) << '\n';
  return out.str();
}

std::string MetricsReport::to_table() const {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-14s %12s %12s\n", "method", "PSNR (dB)", "ENL");
  out << line;
  const auto cell = [](const std::optional<double>& v) {
    const std::string s = fmt_value(v);
    return s.empty() ? std::string("-") : s;
  };
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%-14s %12s %12s\n", row.method.c_str(), cell(row.psnr_db).c_str(),
                  cell(row.enl).c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "%-14s %12s %12s\n", "clean", "-", cell(clean_enl).c_str());
  out << line;
  std::snprintf(line, sizeof line, "ENL region: row %d col %d, %dx%d\n", enl_region.row, enl_region.col,
                enl_region.width, enl_region.height);
  out << line;
  return out.str();
}

}  // namespace sarsr
