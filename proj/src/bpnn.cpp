#include "sarsr/bpnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "sarsr/error.hpp"

namespace sarsr {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2 || sizes.front() != kFeatureCount || sizes.back() != kTargetCount) {
    throw Error(ErrorKind::invalid_argument, "network must map 5 inputs to 4 outputs");
  }
  if (std::any_of(sizes.begin(), sizes.end(), [](int s) { return s < 1; })) {
    throw Error(ErrorKind::invalid_argument, "layer sizes must be positive");
  }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Activations of every layer, input included.
std::vector<std::vector<double>> forward_all(const Mlp& net, std::span<const double> input) {
  const auto& sizes = net.layer_sizes();
  std::vector<std::vector<double>> act(sizes.size());
  act[0].assign(input.begin(), input.end());
  for (int l = 0; l < net.layer_count(); ++l) {
    const int n_in = sizes[l];
    const int n_out = sizes[l + 1];
    const auto w = net.weights(l);
    const auto b = net.biases(l);
    const bool output_layer = l + 1 == net.layer_count();
    auto& out = act[l + 1];
    out.resize(n_out);
    for (int o = 0; o < n_out; ++o) {
      double z = b[o];
      for (int i = 0; i < n_in; ++i) z += w[static_cast<std::size_t>(o) * n_in + i] * act[l][i];
      out[o] = output_layer ? z : sigmoid(z);
    }
  }
  return act;
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes, std::vector<std::vector<double>> weights,
         std::vector<std::vector<double>> biases)
    : sizes_(std::move(layer_sizes)), weights_(std::move(weights)), biases_(std::move(biases)) {
  check_sizes(sizes_);
  const std::size_t layers = sizes_.size() - 1;
  if (weights_.size() != layers || biases_.size() != layers) {
    throw Error(ErrorKind::invalid_argument, "weight/bias layer count does not match layer sizes");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (weights_[l].size() != static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] ||
        biases_[l].size() != static_cast<std::size_t>(sizes_[l + 1])) {
      throw Error(ErrorKind::invalid_argument, "layer " + std::to_string(l) + " has inconsistent shape");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(weights_[l].begin(), weights_[l].end(), finite) ||
        !std::all_of(biases_[l].begin(), biases_[l].end(), finite)) {
      throw Error(ErrorKind::invalid_argument, "network parameters must be finite");
    }
  }
}

Mlp Mlp::zeros(std::vector<int> layer_sizes) {
  check_sizes(layer_sizes);
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    w.emplace_back(static_cast<std::size_t>(layer_sizes[l]) * layer_sizes[l + 1], 0.0);
    b.emplace_back(layer_sizes[l + 1], 0.0);
  }
  return Mlp(std::move(layer_sizes), std::move(w), std::move(b));
}

Mlp Mlp::random(std::vector<int> layer_sizes, std::uint64_t seed) {
  Mlp net = zeros(std::move(layer_sizes));
  std::mt19937_64 rng(seed);
  for (int l = 0; l < net.layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
    for (double& w : net.weights_[l]) w = (2.0 * unit_uniform(rng) - 1.0) * bound;
  }
  return net;
}

std::size_t Mlp::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

double Mlp::parameter(std::size_t k) const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (k < weights_[l].size()) return weights_[l][k];
    k -= weights_[l].size();
    if (k < biases_[l].size()) return biases_[l][k];
    k -= biases_[l].size();
  }
  throw Error(ErrorKind::invalid_argument, "parameter index out of range");
}

void Mlp::set_parameter(std::size_t k, double value) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (k < weights_[l].size()) {
      weights_[l][k] = value;
      return;
    }
    k -= weights_[l].size();
    if (k < biases_[l].size()) {
      biases_[l][k] = value;
      return;
    }
    k -= biases_[l].size();
  }
  throw Error(ErrorKind::invalid_argument, "parameter index out of range");
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw Error(ErrorKind::invalid_argument, "learning rate must be a non-negative finite number");
  }
  if (cfg.epochs < 1) throw Error(ErrorKind::invalid_argument, "epochs must be at least 1");
  if (std::any_of(cfg.hidden.begin(), cfg.hidden.end(), [](int s) { return s < 1; })) {
    throw Error(ErrorKind::invalid_argument, "hidden layer sizes must be positive");
  }
}

Targets forward(const Mlp& net, const Features& features) {
  const auto act = forward_all(net, features);
  Targets out{};
  std::copy(act.back().begin(), act.back().end(), out.begin());
  return out;
}

double sample_loss(const Mlp& net, const TrainingRow& row) {
  const auto out = forward(net, row.features);
  double loss = 0.0;
  for (int k = 0; k < kTargetCount; ++k) loss += (out[k] - row.targets[k]) * (out[k] - row.targets[k]);
  return loss / kTargetCount;
}

namespace {

// Backprop for one sample; returns the pre-update loss and fills `grad` in flat
// parameter order.
double backprop(const Mlp& net, const TrainingRow& row, std::vector<double>& grad) {
  const auto act = forward_all(net, row.features);
  const auto& sizes = net.layer_sizes();
  const int layers = net.layer_count();

  std::vector<std::size_t> offset(layers);
  std::size_t total = 0;
  for (int l = 0; l < layers; ++l) {
    offset[l] = total;
    total += static_cast<std::size_t>(sizes[l]) * sizes[l + 1] + sizes[l + 1];
  }
  grad.assign(total, 0.0);

  double loss = 0.0;
  std::vector<double> delta(kTargetCount);
  for (int k = 0; k < kTargetCount; ++k) {
    const double err = act.back()[k] - row.targets[k];
    loss += err * err;
    delta[k] = 2.0 * err / kTargetCount;
  }
  loss /= kTargetCount;

  for (int l = layers - 1; l >= 0; --l) {
    const int n_in = sizes[l];
    const int n_out = sizes[l + 1];
    const auto w = net.weights(l);
    double* gw = grad.data() + offset[l];
    double* gb = gw + static_cast<std::size_t>(n_in) * n_out;
    for (int o = 0; o < n_out; ++o) {
      for (int i = 0; i < n_in; ++i) gw[static_cast<std::size_t>(o) * n_in + i] = delta[o] * act[l][i];
      gb[o] = delta[o];
    }
    if (l == 0) break;
    std::vector<double> prev(n_in, 0.0);
    for (int i = 0; i < n_in; ++i) {
      double s = 0.0;
      for (int o = 0; o < n_out; ++o) s += w[static_cast<std::size_t>(o) * n_in + i] * delta[o];
      const double a = act[l][i];
      prev[i] = s * a * (1.0 - a);
    }
    delta = std::move(prev);
  }
  return loss;
}

}  // namespace

std::vector<double> loss_gradient(const Mlp& net, const TrainingRow& row) {
  std::vector<double> grad;
  backprop(net, row, grad);
  return grad;
}

std::vector<double> numeric_gradient(const Mlp& net, const TrainingRow& row, double step) {
  Mlp probe = net;
  std::vector<double> grad(net.parameter_count());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const double original = net.parameter(k);
    probe.set_parameter(k, original + step);
    const double up = sample_loss(probe, row);
    probe.set_parameter(k, original - step);
    const double down = sample_loss(probe, row);
    probe.set_parameter(k, original);
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

double gradient_check(const Mlp& net, const TrainingRow& row) {
  const auto analytic = loss_gradient(net, row);
  const auto numeric = numeric_gradient(net, row, 1e-5);
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double denom = std::max(1e-8, std::abs(analytic[k]) + std::abs(numeric[k]));
    worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / denom);
  }
  return worst;
}

TrainResult train(Mlp net, const TrainingSet& data, const TrainConfig& cfg) {
  validate(cfg);
  if (data.empty()) throw Error(ErrorKind::empty_training_set, "training set is empty");
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad;
  TrainResult result{std::move(net), {}};
  Mlp& model = result.net;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      // Fisher-Yates; rng() % n keeps the order independent of the standard library
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng() % (i + 1)]);
      }
    }
    double epoch_loss = 0.0;
    for (std::size_t idx : order) {
      epoch_loss += backprop(model, data[idx], grad);
      if (cfg.learning_rate == 0.0) continue;
      std::size_t k = 0;
      for (int l = 0; l < model.layer_count(); ++l) {
        for (double& w : model.weights(l)) w -= cfg.learning_rate * grad[k++];
        for (double& b : model.biases(l)) b -= cfg.learning_rate * grad[k++];
      }
    }
    epoch_loss /= static_cast<double>(data.size());
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorKind::divergence, "training diverged at epoch " + std::to_string(epoch + 1) +
                                             " (loss is not finite); lower the learning rate");
    }
    result.loss_trace.push_back(epoch_loss);
  }
  return result;
}

// -- self-similar super-resolution ----------------------------------------------

namespace {

Image predicted_quads(const Image& img, const WindowConfig& cfg, const KernelParams& params,
                      const LogOffset& off, const BpnnOptions& opts) {
  if (opts.features == FeatureSource::nearest) return nearest_upscale_2x(img);
  return sr_despeckle_upscale(img, cfg, params, off, opts.sr, opts.exec, opts.sr_mode);
}

Features features_at(const Image& coarse, const Image& pred, Coord x) {
  Features f{};
  f[0] = std::clamp(coarse(x), 0.0, 1.0);
  const auto quad = child_coords(x);
  for (int q = 0; q < 4; ++q) f[q + 1] = std::clamp(pred(quad[q]), 0.0, 1.0);
  return f;
}

}  // namespace

TrainingSet build_training_set(const Image& noisy, const WindowConfig& cfg, const KernelParams& params,
                               const LogOffset& off, const BpnnOptions& opts) {
  const Image low = downsample_2x(noisy, opts.sr.downsample);
  const Image pred = predicted_quads(low, cfg, params, off, opts);
  const Image ref = despeckle(noisy, cfg, params, off, opts.exec);
  TrainingSet rows;
  rows.reserve(low.size());
  for (int r = 0; r < low.height(); ++r) {
    for (int c = 0; c < low.width(); ++c) {
      TrainingRow row;
      row.features = features_at(low, pred, {r, c});
      const auto quad = child_coords({r, c});
      for (int q = 0; q < 4; ++q) row.targets[q] = std::clamp(ref(quad[q]), 0.0, 1.0);
      rows.push_back(row);
    }
  }
  return rows;
}

Image predict_upscale(const Mlp& net, const Image& img, const WindowConfig& cfg,
                      const KernelParams& params, const LogOffset& off, const BpnnOptions& opts) {
  const Image pred = predicted_quads(img, cfg, params, off, opts);
  Image out(2 * img.width(), 2 * img.height());
  parallel_rows(img.height(), opts.exec, [&](int row_begin, int row_end) {
    for (int r = row_begin; r < row_end; ++r) {
      for (int c = 0; c < img.width(); ++c) {
        const auto y = forward(net, features_at(img, pred, {r, c}));
        const auto quad = child_coords({r, c});
        for (int q = 0; q < 4; ++q) out(quad[q].row, quad[q].col) = std::clamp(y[q], 0.0, 1.0);
      }
    }
  });
  return out;
}

Image combined_sr(const Image& noisy, const WindowConfig& cfg, const KernelParams& params,
                  const LogOffset& off, const TrainConfig& tcfg, const BpnnOptions& opts,
                  std::vector<double>* loss_trace) {
  validate(tcfg);
  const auto data = build_training_set(noisy, cfg, params, off, opts);
  std::vector<int> sizes{kFeatureCount};
  sizes.insert(sizes.end(), tcfg.hidden.begin(), tcfg.hidden.end());
  sizes.push_back(kTargetCount);
  auto trained = train(Mlp::random(sizes, tcfg.seed), data, tcfg);
  if (loss_trace) *loss_trace = trained.loss_trace;
  return predict_upscale(trained.net, noisy, cfg, params, off, opts);
}

// -- model files ------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size()) {
    throw Error(ErrorKind::format, "bad number in model file: '" + tok + "'");
  }
  return v;
}

}  // namespace

void write_mlp(std::ostream& out, const Mlp& net) {
  const auto& sizes = net.layer_sizes();
  out << "sarsr-mlp " << sizes.size();
  for (int s : sizes) out << ' ' << s;
  out << '\n';
  for (int l = 0; l < net.layer_count(); ++l) {
    const int n_in = sizes[l];
    const auto w = net.weights(l);
    for (int o = 0; o < sizes[l + 1]; ++o) {
      for (int i = 0; i < n_in; ++i) {
        out << (i ? " " : "") << fmt17(w[static_cast<std::size_t>(o) * n_in + i]);
      }
      out << '\n';
    }
    const auto b = net.biases(l);
    for (std::size_t o = 0; o < b.size(); ++o) out << (o ? " " : "") << fmt17(b[o]);
    out << '\n';
  }
}

Mlp read_mlp(std::istream& in) {
  std::string magic;
  std::size_t count = 0;
  if (!(in >> magic >> count) || magic != "sarsr-mlp" || count < 2 || count > 64) {
    throw Error(ErrorKind::format, "not a sarsr-mlp model file");
  }
  std::vector<int> sizes(count);
  for (int& s : sizes) {
    if (!(in >> s) || s < 1 || s > 1 << 16) throw Error(ErrorKind::format, "bad layer size in model file");
  }
  check_sizes(sizes);
  std::vector<std::vector<double>> w(count - 1);
  std::vector<std::vector<double>> b(count - 1);
  std::string tok;
  const auto next = [&] {
    if (!(in >> tok)) throw Error(ErrorKind::format, "model file is truncated");
    return parse_double(tok);
  };
  for (std::size_t l = 0; l + 1 < count; ++l) {
    w[l].resize(static_cast<std::size_t>(sizes[l]) * sizes[l + 1]);
    b[l].resize(sizes[l + 1]);
    for (double& v : w[l]) v = next();
    for (double& v : b[l]) v = next();
  }
  if (in >> tok) throw Error(ErrorKind::format, "trailing data in model file");
  return Mlp(std::move(sizes), std::move(w), std::move(b));
}

void save_mlp(const Mlp& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  write_mlp(out, net);
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

Mlp load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return read_mlp(in);
}

}  // namespace sarsr
