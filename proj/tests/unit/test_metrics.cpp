#include <cmath>
#include <limits>

#include "doctest.h"
#include "sarsr/error.hpp"
#include "sarsr/metrics.hpp"
#include "support/oracles.hpp"

using namespace sarsr;

TEST_SUITE("metrics") {

TEST_CASE("psnr reference values") {
  const Image a = oracle::random_image(7, 5, 1);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(Image(4, 4, 0.0), Image(4, 4, 1.0)) == doctest::Approx(0.0).epsilon(1e-15));
  // uniform error 0.25 -> MSE 1/16 -> 10 log10(16)
  CHECK(psnr(Image(3, 3, 0.25), Image(3, 3, 0.5)) == doctest::Approx(12.0412).epsilon(1e-5));
  CHECK(mse(Image(2, 1, std::vector<double>{0.0, 0.5}), Image(2, 1, 0.0)) == doctest::Approx(0.125));
}

TEST_CASE("psnr is symmetric and decreases with error") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Image a = oracle::random_image(8, 8, seed);
    const Image b = oracle::random_image(8, 8, seed + 50);
    CHECK(psnr(a, b) == psnr(b, a));
  }
  const Image ref(4, 4, 0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 10; ++k) {
    const double p = psnr(Image(4, 4, 0.5 + 0.04 * k), ref);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("psnr rejects mismatched sizes") {
  try {
    psnr(Image(4, 4), Image(4, 5));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::dimension_mismatch);
  }
}

TEST_CASE("enl reference values") {
  const Image row(3, 1, std::vector<double>{1.0, 2.0, 3.0});
  CHECK(*enl(row, Region::whole(row)) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(*enl(row, Region::whole(row), VarianceKind::sample) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_FALSE(enl(Image(5, 5, 0.3), Region::whole(Image(5, 5))).has_value());

  const Image img = oracle::random_image(9, 9, 2, 0.1, 0.9);
  std::vector<double> scaled(img.pixels().begin(), img.pixels().end());
  for (double& v : scaled) v *= 3.7;
  const Region r{1, 2, 5, 6};
  CHECK(*enl(Image(9, 9, scaled), r) == doctest::Approx(*enl(img, r)).epsilon(1e-12));
}

TEST_CASE("enl region validation") {
  const Image img(8, 8, 0.5);
  CHECK_THROWS_AS(enl(img, {0, 0, 9, 1}), Error);
  CHECK_THROWS_AS(enl(img, {-1, 0, 2, 2}), Error);
  CHECK_THROWS_AS(enl(img, {0, 0, 1, 1}), Error);
  CHECK_THROWS_AS(enl(img, {7, 7, 2, 1}), Error);
}

TEST_CASE("min variance region finds the flat patch") {
  Image img = oracle::random_image(20, 16, 3);
  for (int r = 5; r < 9; ++r) {
    for (int c = 11; c < 15; ++c) img(r, c) = 0.4;
  }
  CHECK(min_variance_region(img, 4) == Region{5, 11, 4, 4});
  CHECK(min_variance_region(Image(6, 6, 0.1), 3) == Region{0, 0, 3, 3});
  CHECK_THROWS_AS(min_variance_region(img, 17), Error);
}

TEST_CASE("report formats") {
  MetricsReport report;
  report.rows = {{"bicubic", 21.5, 3.25}, {"denoise-only", std::numeric_limits<double>::infinity(), std::nullopt}};
  report.clean_enl = 2.0;
  report.enl_region = {1, 2, 3, 4};
  CHECK(report.to_csv() == "method,psnr_db,enl\nbicubic,21.5000,3.2500\ndenoise-only,inf,\nclean,inf,2.0000\n");
  const std::string table = report.to_table();
  CHECK(table.find("bicubic") != std::string::npos);
  CHECK(table.find("ENL region: row 1 col 2, 3x4") != std::string::npos);
  CHECK(report.find("bicubic")->psnr_db == 21.5);
  CHECK(report.find("combined") == nullptr);
}

}  // TEST_SUITE
