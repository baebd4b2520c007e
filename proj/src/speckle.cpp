#include "sarsr/speckle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "sarsr/error.hpp"

namespace sarsr {

void validate(const SpeckleParams& params) {
  if (!(params.sigma >= 0.0 && params.sigma < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "speckle sigma must lie in [0, 1), got " +
                                                 std::to_string(params.sigma));
  }
  if (!(params.min_factor > 0.0 && params.min_factor < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "speckle min_factor must lie in (0, 1)");
  }
}

void validate(const LogOffset& off) {
  if (!(off.epsilon > 0.0 && off.epsilon <= 1e-3)) {
    throw Error(ErrorKind::invalid_argument, "log offset epsilon must lie in (0, 1e-3], got " +
                                                 std::to_string(off.epsilon));
  }
}

namespace {

// std::uniform_real_distribution and friends are implementation-defined; these
// mappings keep the noise bit-identical across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class NoiseSource {
 public:
  explicit NoiseSource(const SpeckleParams& p) : p_(p), rng_(p.seed) {}

  double factor() {
    for (;;) {
      const double f = 1.0 + draw();
      if (f > p_.min_factor) return f;
    }
  }

 private:
  double draw() {
    if (p_.distribution == NoiseDistribution::uniform) {
      const double half_width = p_.sigma * std::numbers::sqrt3;
      return (2.0 * unit_uniform(rng_) - 1.0) * half_width;
    }
    if (has_spare_) {
      has_spare_ = false;
      return spare_ * p_.sigma;
    }
    // Box-Muller, both outputs used
    const double u1 = 1.0 - unit_uniform(rng_);  // (0, 1]
    const double u2 = unit_uniform(rng_);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle) * p_.sigma;
  }

  SpeckleParams p_;
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

Image add_speckle(const Image& img, const SpeckleParams& params) {
  validate(params);
  Image out = img;
  if (params.sigma == 0.0) return out;
  NoiseSource noise(params);
  for (double& v : out.pixels()) v *= noise.factor();
  return out;
}

Image to_log_domain(const Image& img, const LogOffset& off) {
  validate(off);
  Image out = img;
  for (double& v : out.pixels()) {
    if (v < 0.0) {
      throw Error(ErrorKind::invalid_argument, "to_log_domain: negative pixel " + std::to_string(v));
    }
    v = std::log(v + off.epsilon);
  }
  return out;
}

Image from_log_domain(const Image& img, const LogOffset& off) {
  validate(off);
  Image out = img;
  for (double& v : out.pixels()) v = std::exp(v) - off.epsilon;
  return out;
}

}  // namespace sarsr
