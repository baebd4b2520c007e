#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sarsr/bpnn.hpp"
#include "sarsr/image.hpp"
#include "sarsr/metrics.hpp"
#include "sarsr/nlmeans.hpp"
#include "sarsr/speckle.hpp"
#include "sarsr/sr_upscale.hpp"

namespace sarsr {

enum class Method { bicubic, nlm_sr, bpnn, combined, denoise_only };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);

enum class EnlRegionMode {
  auto_window,  ///< lowest-variance window of the clean image
  full,         ///< whole image
  fixed,        ///< explicit rectangle
};

struct EnlRegionSpec {
  EnlRegionMode mode = EnlRegionMode::full;
  int window = 32;
  Region region{};
};

/// Everything an experiment needs. Each field maps to one key of the flat
/// `key = value` config format; see config_keys().
struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = "out";
  std::optional<std::uint64_t> seed;  ///< required by every stochastic stage
  SpeckleParams speckle{};
  WindowConfig window{};
  KernelParams kernel{};
  LogOffset log_offset{};
  TrainConfig train{};
  SrOptions sr{};
  SrMode sr_mode = SrMode::single_pass;
  std::vector<Method> methods{Method::bicubic, Method::nlm_sr, Method::bpnn, Method::combined,
                              Method::denoise_only};
  EnlRegionSpec enl{};
  int threads = 1;
};

struct ConfigKey {
  std::string name;
  std::string help;
};

/// Every accepted config key with its default, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key. Unknown keys and malformed values throw Error(config).
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; '#' starts a comment. Relative `input` and
/// `output_dir` paths are resolved against `base_dir` when given.
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Renders the config back into the key = value format.
std::string format_config(const PipelineConfig& cfg);

/// Per-stage options derived from a config.
BpnnOptions bpnn_options(const PipelineConfig& cfg, FeatureSource features);

/// Upscales `low` 2x with one method. `noisy` (2x the size of `low`) is only
/// read by denoise-only, which despeckles it without shrinking.
Image run_method(Method method, const Image& low, const Image& noisy, const PipelineConfig& cfg);

struct ExperimentResult {
  MetricsReport report;
  std::map<std::string, Image> images;  ///< keyed by output file stem
};

/// Load clean image (2N) -> speckle -> shrink (N) -> every selected method back
/// to 2N -> PSNR against the clean image and ENL. Writes clean.pgm, noisy.pgm,
/// low.pgm, <method>.pgm, report.csv and report.txt into output_dir when
/// `write_outputs` is set. Errors carry the failing stage name.
ExperimentResult run_experiment(const PipelineConfig& cfg, bool write_outputs = true);

/// Same protocol with the clean image supplied directly.
ExperimentResult run_experiment_on(const Image& clean, const PipelineConfig& cfg);

}  // namespace sarsr
