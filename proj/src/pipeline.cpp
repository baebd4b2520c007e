#include "sarsr/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "sarsr/error.hpp"

namespace sarsr {

namespace {

constexpr std::string_view kMethodNames[] = {"bicubic", "nlm-sr", "bpnn", "combined", "denoise-only"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorKind::config, "bad value '" + std::string(value) + "' for key '" + std::string(key) +
                                     "' (expected " + std::string(expected) + ")");
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, v, "a number");
  return d;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true/false");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? "," : "") + std::to_string(xs[k]);
  return out;
}

struct KeyDef {
  ConfigKey doc;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<KeyDef>& key_defs() {
  static const std::vector<KeyDef> defs = [] {
    std::vector<KeyDef> d;
    const auto add = [&d](std::string name, std::string help, auto set, auto get) {
      d.push_back({{std::move(name), std::move(help)}, set, get});
    };
    add("input", "clean input image (PGM/PNG) at the reference scale 2N",
        [](PipelineConfig& c, std::string_view v) { c.input = std::string(v); },
        [](const PipelineConfig& c) { return c.input.string(); });
    add("output_dir", "directory for emitted images and reports (default out)",
        [](PipelineConfig& c, std::string_view v) { c.output_dir = std::string(v); },
        [](const PipelineConfig& c) { return c.output_dir.string(); });
    add("seed", "RNG seed for speckle and training; required",
        [](PipelineConfig& c, std::string_view v) { c.seed = to_int<std::uint64_t>("seed", v); },
        [](const PipelineConfig& c) { return c.seed ? std::to_string(*c.seed) : std::string(); });
    add("sigma", "std of the multiplicative noise factor n (default 0.2)",
        [](PipelineConfig& c, std::string_view v) { c.speckle.sigma = to_double("sigma", v); },
        [](const PipelineConfig& c) { return fmt(c.speckle.sigma); });
    add("noise", "uniform | gaussian (default uniform)",
        [](PipelineConfig& c, std::string_view v) {
          if (v == "uniform") c.speckle.distribution = NoiseDistribution::uniform;
          else if (v == "gaussian") c.speckle.distribution = NoiseDistribution::gaussian;
          else bad_value("noise", v, "uniform|gaussian");
        },
        [](const PipelineConfig& c) {
          return std::string(c.speckle.distribution == NoiseDistribution::uniform ? "uniform" : "gaussian");
        });
    add("patch_radius", "neighborhood radius r, window (2r+1)^2 (default 3)",
        [](PipelineConfig& c, std::string_view v) { c.window.patch_radius = to_int<int>("patch_radius", v); },
        [](const PipelineConfig& c) { return std::to_string(c.window.patch_radius); });
    add("search_radius", "search radius R, window (2R+1)^2 (default 10)",
        [](PipelineConfig& c, std::string_view v) { c.window.search_radius = to_int<int>("search_radius", v); },
        [](const PipelineConfig& c) { return std::to_string(c.window.search_radius); });
    add("boundary", "reflect | clamp (default reflect)",
        [](PipelineConfig& c, std::string_view v) {
          if (v == "reflect") c.window.boundary = Boundary::reflect;
          else if (v == "clamp") c.window.boundary = Boundary::clamp;
          else bad_value("boundary", v, "reflect|clamp");
        },
        [](const PipelineConfig& c) {
          return std::string(c.window.boundary == Boundary::reflect ? "reflect" : "clamp");
        });
    add("cap_self_weight", "give the centre pixel the largest other weight (default false)",
        [](PipelineConfig& c, std::string_view v) { c.window.cap_self_weight = to_bool("cap_self_weight", v); },
        [](const PipelineConfig& c) { return std::string(c.window.cap_self_weight ? "true" : "false"); });
    add("kernel", "exp | cosine | combined (default combined)",
        [](PipelineConfig& c, std::string_view v) {
          if (v == "exp") c.kernel.kind = KernelKind::exp;
          else if (v == "cosine") c.kernel.kind = KernelKind::cosine;
          else if (v == "combined") c.kernel.kind = KernelKind::combined;
          else bad_value("kernel", v, "exp|cosine|combined");
        },
        [](const PipelineConfig& c) {
          switch (c.kernel.kind) {
            case KernelKind::exp: return std::string("exp");
            case KernelKind::cosine: return std::string("cosine");
            case KernelKind::combined: break;
          }
          return std::string("combined");
        });
    add("h", "smoothing parameter of the exp and cosine kernels (default 0.2)",
        [](PipelineConfig& c, std::string_view v) { c.kernel.h = to_double("h", v); },
        [](const PipelineConfig& c) { return fmt(c.kernel.h); });
    add("h1", "distance cutoff of the combined kernel (default 0.2)",
        [](PipelineConfig& c, std::string_view v) { c.kernel.h1 = to_double("h1", v); },
        [](const PipelineConfig& c) { return fmt(c.kernel.h1); });
    add("h2", "exponent scale of the combined kernel (default 4)",
        [](PipelineConfig& c, std::string_view v) { c.kernel.h2 = to_double("h2", v); },
        [](const PipelineConfig& c) { return fmt(c.kernel.h2); });
    add("epsilon", "offset added before the log transform (default 1e-4)",
        [](PipelineConfig& c, std::string_view v) { c.log_offset.epsilon = to_double("epsilon", v); },
        [](const PipelineConfig& c) { return fmt(c.log_offset.epsilon); });
    add("learning_rate", "SGD step size (default 0.05)",
        [](PipelineConfig& c, std::string_view v) { c.train.learning_rate = to_double("learning_rate", v); },
        [](const PipelineConfig& c) { return fmt(c.train.learning_rate); });
    add("epochs", "training epochs (default 30)",
        [](PipelineConfig& c, std::string_view v) { c.train.epochs = to_int<int>("epochs", v); },
        [](const PipelineConfig& c) { return std::to_string(c.train.epochs); });
    add("shuffle", "shuffle samples every epoch (default true)",
        [](PipelineConfig& c, std::string_view v) { c.train.shuffle = to_bool("shuffle", v); },
        [](const PipelineConfig& c) { return std::string(c.train.shuffle ? "true" : "false"); });
    add("hidden", "comma-separated hidden layer sizes (default 12)",
        [](PipelineConfig& c, std::string_view v) {
          std::vector<int> sizes;
          for (auto part : split(v, ',')) sizes.push_back(to_int<int>("hidden", part));
          c.train.hidden = std::move(sizes);
        },
        [](const PipelineConfig& c) { return join_ints(c.train.hidden); });
    add("methods", "comma-separated subset of bicubic,nlm-sr,bpnn,combined,denoise-only (default all)",
        [](PipelineConfig& c, std::string_view v) {
          std::vector<Method> ms;
          for (auto part : split(v, ',')) ms.push_back(parse_method(part));
          c.methods = std::move(ms);
        },
        [](const PipelineConfig& c) {
          std::string out;
          for (std::size_t k = 0; k < c.methods.size(); ++k) {
            out += (k ? "," : "") + std::string(to_string(c.methods[k]));
          }
          return out;
        });
    add("sr_mode", "single (despeckle while upscaling) | two-stage (despeckle, then upscale) (default single)",
        [](PipelineConfig& c, std::string_view v) {
          if (v == "single") c.sr_mode = SrMode::single_pass;
          else if (v == "two-stage") c.sr_mode = SrMode::two_stage;
          else bad_value("sr_mode", v, "single|two-stage");
        },
        [](const PipelineConfig& c) {
          return std::string(c.sr_mode == SrMode::single_pass ? "single" : "two-stage");
        });
    add("cross_scale_patches", "compare against shrunk-image patches in the upscaler (default false)",
        [](PipelineConfig& c, std::string_view v) {
          c.sr.cross_scale_patches = to_bool("cross_scale_patches", v);
        },
        [](const PipelineConfig& c) { return std::string(c.sr.cross_scale_patches ? "true" : "false"); });
    add("downsample", "average | decimate (default average)",
        [](PipelineConfig& c, std::string_view v) {
          if (v == "average") c.sr.downsample = DownsampleMode::average;
          else if (v == "decimate") c.sr.downsample = DownsampleMode::decimate;
          else bad_value("downsample", v, "average|decimate");
        },
        [](const PipelineConfig& c) {
          return std::string(c.sr.downsample == DownsampleMode::average ? "average" : "decimate");
        });
    add("enl_region", "full | auto | row,col,width,height (default full)",
        [](PipelineConfig& c, std::string_view v) {
          if (v == "full") {
            c.enl.mode = EnlRegionMode::full;
          } else if (v == "auto") {
            c.enl.mode = EnlRegionMode::auto_window;
          } else {
            const auto parts = split(v, ',');
            if (parts.size() != 4) bad_value("enl_region", v, "full|auto|row,col,width,height");
            c.enl.mode = EnlRegionMode::fixed;
            c.enl.region = {to_int<int>("enl_region", parts[0]), to_int<int>("enl_region", parts[1]),
                            to_int<int>("enl_region", parts[2]), to_int<int>("enl_region", parts[3])};
          }
        },
        [](const PipelineConfig& c) {
          switch (c.enl.mode) {
            case EnlRegionMode::full: return std::string("full");
            case EnlRegionMode::auto_window: return std::string("auto");
            case EnlRegionMode::fixed: break;
          }
          const auto& r = c.enl.region;
          return join_ints({r.row, r.col, r.width, r.height});
        });
    add("enl_window", "side of the auto-selected ENL window (default 32)",
        [](PipelineConfig& c, std::string_view v) { c.enl.window = to_int<int>("enl_window", v); },
        [](const PipelineConfig& c) { return std::to_string(c.enl.window); });
    add("threads", "worker threads for the per-pixel kernels (default 1)",
        [](PipelineConfig& c, std::string_view v) { c.threads = to_int<int>("threads", v); },
        [](const PipelineConfig& c) { return std::to_string(c.threads); });
    return d;
  }();
  return defs;
}

// Runs one stage and prefixes any library error with the stage name.
template <typename Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

void validate_config(const PipelineConfig& cfg) {
  if (!cfg.seed) throw Error(ErrorKind::config, "seed is required (no wall-clock seeding)");
  if (cfg.methods.empty()) throw Error(ErrorKind::config, "no methods selected");
  if (cfg.threads < 1) throw Error(ErrorKind::config, "threads must be at least 1");
  validate(cfg.speckle);
  validate(cfg.window);
  validate(cfg.kernel);
  validate(cfg.log_offset);
  validate(cfg.train);
}

}  // namespace

std::string_view to_string(Method m) noexcept { return kMethodNames[static_cast<int>(m)]; }

Method parse_method(std::string_view name) {
  for (int k = 0; k < 5; ++k) {
    if (kMethodNames[k] == name) return static_cast<Method>(k);
  }
  throw Error(ErrorKind::config, "unknown method '" + std::string(name) +
                                     "' (expected bicubic, nlm-sr, bpnn, combined or denoise-only)");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& def : key_defs()) out.push_back(def.doc);
    return out;
  }();
  return keys;
}

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& def : key_defs()) {
    if (def.doc.name == key) {
      def.set(cfg, trim(value));
      return;
    }
  }
  throw Error(ErrorKind::config, "unknown config key '" + std::string(key) + "'");
}

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::config, "line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_setting(cfg, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorKind::config, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!base_dir.empty()) {
    if (!cfg.input.empty() && cfg.input.is_relative()) cfg.input = base_dir / cfg.input;
    if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& def : key_defs()) {
    const auto value = def.get(cfg);
    if (value.empty()) continue;
    out += def.doc.name + " = " + value + "\n";
  }
  return out;
}

BpnnOptions bpnn_options(const PipelineConfig& cfg, FeatureSource features) {
  return {features, cfg.sr, cfg.sr_mode, Exec{cfg.threads}};
}

Image run_method(Method method, const Image& low, const Image& noisy, const PipelineConfig& cfg) {
  const Exec exec{cfg.threads};
  TrainConfig tcfg = cfg.train;
  if (cfg.seed) tcfg.seed = *cfg.seed;
  switch (method) {
    case Method::bicubic:
      return bicubic_upscale_2x(low, cfg.window.boundary);
    case Method::nlm_sr:
      return sr_despeckle_upscale(low, cfg.window, cfg.kernel, cfg.log_offset, cfg.sr, exec, cfg.sr_mode);
    case Method::bpnn:
      return combined_sr(low, cfg.window, cfg.kernel, cfg.log_offset, tcfg,
                         bpnn_options(cfg, FeatureSource::nearest));
    case Method::combined:
      return combined_sr(low, cfg.window, cfg.kernel, cfg.log_offset, tcfg,
                         bpnn_options(cfg, FeatureSource::nlm));
    case Method::denoise_only:
      return despeckle(noisy, cfg.window, cfg.kernel, cfg.log_offset, exec);
  }
  throw Error(ErrorKind::config, "unhandled method");
}

ExperimentResult run_experiment_on(const Image& clean, const PipelineConfig& cfg) {
  stage("config", [&] { validate_config(cfg); });
  ExperimentResult result;
  SpeckleParams sp = cfg.speckle;
  sp.seed = *cfg.seed;
  const Image noisy = stage("add-noise", [&] { return add_speckle(clean, sp); });
  const Image low = stage("downsample", [&] { return downsample_2x(noisy, cfg.sr.downsample); });

  auto& report = result.report;
  report.enl_region = stage("metrics", [&] {
    switch (cfg.enl.mode) {
      case EnlRegionMode::full: return Region::whole(clean);
      case EnlRegionMode::auto_window: return min_variance_region(clean, cfg.enl.window);
      case EnlRegionMode::fixed: break;
    }
    return cfg.enl.region;
  });
  report.clean_enl = stage("metrics", [&] { return enl(clean, report.enl_region); });

  result.images.emplace("clean", clean);
  result.images.emplace("noisy", noisy);
  result.images.emplace("low", low);
  for (Method m : cfg.methods) {
    const std::string name(to_string(m));
    Image out = stage(name, [&] { return run_method(m, low, noisy, cfg); });
    MethodMetrics row{name, std::nullopt, std::nullopt};
    stage("metrics", [&] {
      row.psnr_db = psnr(out, clean);
      row.enl = enl(out, report.enl_region);
    });
    report.rows.push_back(row);
    result.images.insert_or_assign(name, std::move(out));
  }
  return result;
}

ExperimentResult run_experiment(const PipelineConfig& cfg, bool write_outputs) {
  stage("config", [&] {
    validate_config(cfg);
    if (cfg.input.empty()) throw Error(ErrorKind::config, "input is required");
  });
  const Image clean = stage("load", [&] { return load_image(cfg.input); });
  auto result = run_experiment_on(clean, cfg);
  if (write_outputs) {
    stage("write", [&] {
      std::error_code ec;
      std::filesystem::create_directories(cfg.output_dir, ec);
      if (ec) throw Error(ErrorKind::io, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
      for (const auto& [name, img] : result.images) save_image(img, cfg.output_dir / (name + ".pgm"));
      for (const auto& [file, text] : {std::pair{"report.csv", result.report.to_csv()},
                                       std::pair{"report.txt", result.report.to_table()}}) {
        std::ofstream out(cfg.output_dir / file, std::ios::binary);
        out << text;
        if (!out) throw Error(ErrorKind::io, "cannot write " + (cfg.output_dir / file).string());
      }
    });
  }
  return result;
}

}  // namespace sarsr
