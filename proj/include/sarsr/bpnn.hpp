#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sarsr/image.hpp"
#include "sarsr/nlmeans.hpp"
#include "sarsr/sr_upscale.hpp"

namespace sarsr {

inline constexpr int kFeatureCount = 5;
inline constexpr int kTargetCount = 4;

using Features = std::array<double, kFeatureCount>;
using Targets = std::array<double, kTargetCount>;

/// Fully connected network, logistic hidden layers, identity output layer.
///
/// Layer l maps layer_sizes[l] inputs to layer_sizes[l+1] outputs; its weights
/// are stored row-major with one row per output unit. The input width is always
/// 5 (coarse pixel + predicted child quad) and the output width 4 (child quad).
class Mlp {
 public:
  Mlp(std::vector<int> layer_sizes, std::vector<std::vector<double>> weights,
      std::vector<std::vector<double>> biases);

  static Mlp zeros(std::vector<int> layer_sizes);
  /// Weights uniform in +-1/sqrt(fan_in), biases zero.
  static Mlp random(std::vector<int> layer_sizes, std::uint64_t seed);

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  int layer_count() const noexcept { return static_cast<int>(weights_.size()); }
  std::span<const double> weights(int layer) const { return weights_[layer]; }
  std::span<double> weights(int layer) { return weights_[layer]; }
  std::span<const double> biases(int layer) const { return biases_[layer]; }
  std::span<double> biases(int layer) { return biases_[layer]; }

  /// Flat parameter view: for each layer, weights then biases.
  std::size_t parameter_count() const noexcept;
  double parameter(std::size_t k) const;
  void set_parameter(std::size_t k, double value);

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

struct TrainingRow {
  Features features{};
  Targets targets{};
};

using TrainingSet = std::vector<TrainingRow>;

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 30;
  std::uint64_t seed = 0;
  bool shuffle = true;
  std::vector<int> hidden{12};
};

void validate(const TrainConfig& cfg);

Targets forward(const Mlp& net, const Features& features);

/// Mean over the four outputs of the squared error.
double sample_loss(const Mlp& net, const TrainingRow& row);

/// d sample_loss / d parameter, in Mlp's flat parameter order.
std::vector<double> loss_gradient(const Mlp& net, const TrainingRow& row);

/// Central differences of sample_loss, same order as loss_gradient.
std::vector<double> numeric_gradient(const Mlp& net, const TrainingRow& row, double step = 1e-5);

/// max_k |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
double gradient_check(const Mlp& net, const TrainingRow& row);

struct TrainResult {
  Mlp net;
  std::vector<double> loss_trace;  ///< mean sample loss per epoch, measured before each update
};

/// Plain per-sample SGD. Throws on an empty set or a non-finite epoch loss.
TrainResult train(Mlp net, const TrainingSet& data, const TrainConfig& cfg);

// -- self-similar super-resolution --------------------------------------------

enum class FeatureSource {
  nlm,      ///< child quad predicted by sr_despeckle_upscale
  nearest,  ///< child quad by pixel replication (network without NL-means)
};

struct BpnnOptions {
  FeatureSource features = FeatureSource::nlm;
  SrOptions sr{};
  SrMode sr_mode = SrMode::single_pass;
  Exec exec{};
};

/// One row per pixel of the shrunk image: features are the shrunk pixel and the
/// predicted child quad, targets the despeckled child quad at input scale.
/// Values are clamped to [0, 1].
TrainingSet build_training_set(const Image& noisy, const WindowConfig& cfg, const KernelParams& params,
                               const LogOffset& off = {}, const BpnnOptions& opts = {});

/// Applies the network one octave up: output is 2W x 2H, clamped to [0, 1].
Image predict_upscale(const Mlp& net, const Image& img, const WindowConfig& cfg,
                      const KernelParams& params, const LogOffset& off = {},
                      const BpnnOptions& opts = {});

/// build_training_set -> train -> predict_upscale on the same image.
Image combined_sr(const Image& noisy, const WindowConfig& cfg, const KernelParams& params,
                  const LogOffset& off, const TrainConfig& tcfg, const BpnnOptions& opts = {},
                  std::vector<double>* loss_trace = nullptr);

// -- model files --------------------------------------------------------------
//
// Text format:
//   sarsr-mlp <layer count + 1> <size 0> ... <size n>
//   then per layer: one line per output unit holding its weights, then one line
//   of biases. Numbers are written with 17 significant digits.

void write_mlp(std::ostream& out, const Mlp& net);
Mlp read_mlp(std::istream& in);
void save_mlp(const Mlp& net, const std::filesystem::path& path);
Mlp load_mlp(const std::filesystem::path& path);

}  // namespace sarsr
