#include "sarsr/cli.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "sarsr/error.hpp"
#include "sarsr/pipeline.hpp"

namespace sarsr {

namespace {

std::string flag_name(const std::string& key) {
  std::string out = "--" + key;
  for (char& c : out) {
    if (c == '_') c = '-';
  }
  return out;
}

// Registers one string flag per config key; values are applied over the config
// after parsing, so flags win over config-file entries.
struct ConfigFlags {
  std::map<std::string, std::string> values;

  void attach(CLI::App& app, std::initializer_list<const char*> skip = {}) {
    for (const auto& key : config_keys()) {
      bool skipped = false;
      for (const char* s : skip) skipped = skipped || key.name == s;
      if (skipped) continue;
      app.add_option(flag_name(key.name), values[key.name], key.help);
    }
  }

  void apply(CLI::App& app, PipelineConfig& cfg) const {
    for (const auto& [key, value] : values) {
      const auto* opt = app.get_option_no_throw(flag_name(key));
      if (opt && opt->count() > 0) apply_setting(cfg, key, value);
    }
  }
};

template <typename Fn>
void stage(const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    throw Error(e.kind(), name + ": " + e.what());
  }
}

void print_metrics(std::ostream& out, const Image& img, const Image* ref, const Region& region) {
  if (ref) {
    const double p = psnr(img, *ref);
    out << "psnr_db " << (std::isinf(p) ? std::string("inf") : std::to_string(p)) << '\n';
  }
  const auto e = enl(img, region);
  out << "enl " << (e ? std::to_string(*e) : std::string("degenerate")) << '\n';
}

Region resolve_region(const PipelineConfig& cfg, const Image& img) {
  switch (cfg.enl.mode) {
    case EnlRegionMode::full: return Region::whole(img);
    case EnlRegionMode::auto_window: return min_variance_region(img, cfg.enl.window);
    case EnlRegionMode::fixed: break;
  }
  return cfg.enl.region;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speckle-aware 2x super-resolution: NL-means despeckling, cross-scale NL-means upscaling "
               "and a self-trained BP network",
               "sarsr"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  PipelineConfig cfg;

  // add-noise
  auto* add_noise = app.add_subcommand("add-noise", "multiply every pixel by (1 + n)");
  std::string in_path, out_path;
  std::uint64_t seed = 0;
  add_noise->add_option("--in", in_path, "input image")->required();
  add_noise->add_option("--out", out_path, "output PGM")->required();
  add_noise->add_option("--seed", seed, "noise seed")->required();
  ConfigFlags noise_flags;
  for (const char* key : {"sigma", "noise"}) {
    for (const auto& k : config_keys()) {
      if (k.name == key) add_noise->add_option(flag_name(k.name), noise_flags.values[k.name], k.help);
    }
  }

  // denoise
  auto* denoise_cmd = app.add_subcommand("denoise", "NL-means despeckling in the log domain");
  denoise_cmd->add_option("--in", in_path, "input image")->required();
  denoise_cmd->add_option("--out", out_path, "output PGM")->required();
  bool additive = false;
  denoise_cmd->add_flag("--additive", additive, "plain NL-means without the log transform");
  ConfigFlags denoise_flags;
  denoise_flags.attach(*denoise_cmd, {"input", "output_dir", "seed", "methods"});

  // downsample
  auto* down_cmd = app.add_subcommand("downsample", "halve both dimensions (2x2 block mean)");
  down_cmd->add_option("--in", in_path, "input image")->required();
  down_cmd->add_option("--out", out_path, "output PGM")->required();
  bool decimate = false;
  down_cmd->add_flag("--decimate", decimate, "keep the top-left pixel of each block instead");

  // upscale
  auto* up_cmd = app.add_subcommand("upscale", "2x upscale of an arbitrary image (no reference needed)");
  std::string method_name;
  std::string ref_path;
  std::optional<std::uint64_t> up_seed;
  up_cmd->add_option("--in", in_path, "input image")->required();
  up_cmd->add_option("--out", out_path, "output PGM")->required();
  up_cmd->add_option("--method", method_name, "bicubic | nlm-sr | bpnn | combined")->required();
  up_cmd->add_option("--seed", up_seed, "training seed (required for bpnn and combined)");
  up_cmd->add_option("--ref", ref_path, "optional 2x reference image for PSNR");
  ConfigFlags up_flags;
  up_flags.attach(*up_cmd, {"input", "output_dir", "seed", "methods", "sigma", "noise"});

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR against a reference and ENL");
  std::string test_path;
  metrics_cmd->add_option("--test", test_path, "image under test")->required();
  metrics_cmd->add_option("--ref", ref_path, "reference image")->required();
  ConfigFlags metrics_flags;
  for (const char* key : {"enl_region", "enl_window"}) {
    for (const auto& k : config_keys()) {
      if (k.name == key) metrics_cmd->add_option(flag_name(k.name), metrics_flags.values[k.name], k.help);
    }
  }

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "shrink a clean image, restore it with every method, report");
  std::string config_path;
  exp_cmd->add_option("--config", config_path, "key = value config file")->required();
  exp_cmd->add_option("--seed", seed, "seed for speckle and training")->required();
  ConfigFlags exp_flags;
  exp_flags.attach(*exp_cmd, {"seed"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (add_noise->parsed()) {
      noise_flags.apply(*add_noise, cfg);
      Image img(1, 1);
      stage("load", [&] { img = load_image(in_path); });
      SpeckleParams sp = cfg.speckle;
      sp.seed = seed;
      stage("add-noise", [&] { img = add_speckle(img, sp); });
      stage("write", [&] { save_image(img, out_path); });
    } else if (denoise_cmd->parsed()) {
      denoise_flags.apply(*denoise_cmd, cfg);
      Image img(1, 1);
      stage("load", [&] { img = load_image(in_path); });
      stage("denoise", [&] {
        const Exec exec{cfg.threads};
        img = additive ? denoise(img, cfg.window, cfg.kernel, exec)
                       : despeckle(img, cfg.window, cfg.kernel, cfg.log_offset, exec);
      });
      stage("write", [&] { save_image(img, out_path); });
    } else if (down_cmd->parsed()) {
      Image img(1, 1);
      stage("load", [&] { img = load_image(in_path); });
      stage("downsample", [&] {
        img = downsample_2x(img, decimate ? DownsampleMode::decimate : DownsampleMode::average);
      });
      stage("write", [&] { save_image(img, out_path); });
    } else if (up_cmd->parsed()) {
      up_flags.apply(*up_cmd, cfg);
      Method method = Method::bicubic;
      stage("config", [&] {
        method = parse_method(method_name);
        if (method == Method::denoise_only) {
          throw Error(ErrorKind::config, "denoise-only is not an upscaling method; use `denoise`");
        }
        if ((method == Method::bpnn || method == Method::combined) && !up_seed) {
          throw Error(ErrorKind::config, "--seed is required for method " + method_name);
        }
      });
      cfg.seed = up_seed;
      Image img(1, 1);
      stage("load", [&] { img = load_image(in_path); });
      Image result(1, 1);
      stage(method_name, [&] { result = run_method(method, img, img, cfg); });
      stage("write", [&] { save_image(result, out_path); });
      stage("metrics", [&] {
        std::optional<Image> ref;
        if (!ref_path.empty()) ref = load_image(ref_path);
        print_metrics(out, result, ref ? &*ref : nullptr, resolve_region(cfg, result));
      });
    } else if (metrics_cmd->parsed()) {
      metrics_flags.apply(*metrics_cmd, cfg);
      stage("metrics", [&] {
        const Image test = load_image(test_path);
        const Image ref = load_image(ref_path);
        print_metrics(out, test, &ref, resolve_region(cfg, test));
      });
    } else if (exp_cmd->parsed()) {
      stage("config", [&] {
        cfg = load_config(config_path);
        exp_flags.apply(*exp_cmd, cfg);
        cfg.seed = seed;
      });
      const auto result = run_experiment(cfg);
      out << result.report.to_table();
      out << "outputs written to " << cfg.output_dir.string() << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sarsr
