#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <limits>

#include "sarsr/bpnn.hpp"
#include "sarsr/error.hpp"
#include "sarsr/metrics.hpp"
#include "sarsr/nlmeans.hpp"
#include "sarsr/pipeline.hpp"
#include "sarsr/speckle.hpp"
#include "sarsr/sr_upscale.hpp"

namespace py = pybind11;
using namespace sarsr;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image to_image(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  const auto h = a.shape(0);
  const auto w = a.shape(1);
  if (h > std::numeric_limits<int>::max() || w > std::numeric_limits<int>::max()) {
    throw py::value_error("array too large");
  }
  std::vector<double> px(a.data(), a.data() + a.size());
  return Image(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

Array to_array(const Image& img) {
  Array out({img.height(), img.width()});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

Boundary parse_boundary(const std::string& s) {
  if (s == "reflect") return Boundary::reflect;
  if (s == "clamp") return Boundary::clamp;
  throw py::value_error("boundary must be 'reflect' or 'clamp'");
}

// Keyword-style settings share the config-file parser, so names and value
// syntax match the CLI and config files exactly.
PipelineConfig config_from(const py::kwargs& kw) {
  PipelineConfig cfg;
  for (const auto& [k, v] : kw) {
    const auto key = py::cast<std::string>(k);
    std::string value;
    if (py::isinstance<py::bool_>(v)) value = py::cast<bool>(v) ? "true" : "false";
    else if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
      for (const auto& item : v) value += (value.empty() ? "" : ",") + py::cast<std::string>(py::str(item));
    } else {
      value = py::cast<std::string>(py::str(v));
    }
    apply_setting(cfg, key, value);
  }
  return cfg;
}

py::dict report_dict(const MetricsReport& report) {
  py::dict rows;
  for (const auto& row : report.rows) {
    py::dict d;
    d["psnr_db"] = row.psnr_db ? py::cast(*row.psnr_db) : py::none();
    d["enl"] = row.enl ? py::cast(*row.enl) : py::none();
    rows[py::str(row.method)] = d;
  }
  py::dict out;
  out["methods"] = rows;
  out["clean_enl"] = report.clean_enl ? py::cast(*report.clean_enl) : py::none();
  const auto& r = report.enl_region;
  out["enl_region"] = py::make_tuple(r.row, r.col, r.width, r.height);
  return out;
}

// Runs `fn` without the GIL and converts its image result.
template <typename Fn>
Array without_gil(Fn&& fn) {
  Image out(1, 1);
  {
    py::gil_scoped_release release;
    out = fn();
  }
  return to_array(out);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Speckle-aware 2x super-resolution (C++ core)";
  py::register_exception<Error>(m, "SarsrError", PyExc_RuntimeError);

  m.def("config_keys", [] {
    py::dict out;
    for (const auto& k : config_keys()) out[py::str(k.name)] = k.help;
    return out;
  }, "Accepted keyword settings with their descriptions.");

  m.def("load_image", [](const std::filesystem::path& p) { return to_array(load_image(p)); }, py::arg("path"));
  m.def("save_image", [](const Array& a, const std::filesystem::path& p) { save_image(to_image(a), p); },
        py::arg("image"), py::arg("path"));

  m.def("add_speckle", [](const Array& a, std::uint64_t seed, double sigma, const std::string& noise) {
    SpeckleParams sp{.sigma = sigma, .seed = seed};
    if (noise == "gaussian") sp.distribution = NoiseDistribution::gaussian;
    else if (noise != "uniform") throw py::value_error("noise must be 'uniform' or 'gaussian'");
    return to_array(add_speckle(to_image(a), sp));
  }, py::arg("image"), py::arg("seed"), py::arg("sigma") = 0.2, py::arg("noise") = "uniform");

  m.def("to_log_domain", [](const Array& a, double epsilon) {
    return to_array(to_log_domain(to_image(a), {epsilon}));
  }, py::arg("image"), py::arg("epsilon") = 1e-4);
  m.def("from_log_domain", [](const Array& a, double epsilon) {
    return to_array(from_log_domain(to_image(a), {epsilon}));
  }, py::arg("image"), py::arg("epsilon") = 1e-4);

  m.def("downsample_2x", [](const Array& a, bool decimate) {
    return to_array(downsample_2x(to_image(a), decimate ? DownsampleMode::decimate : DownsampleMode::average));
  }, py::arg("image"), py::arg("decimate") = false);
  m.def("bicubic_upscale_2x", [](const Array& a, const std::string& boundary) {
    return to_array(bicubic_upscale_2x(to_image(a), parse_boundary(boundary)));
  }, py::arg("image"), py::arg("boundary") = "reflect");

  m.def("denoise", [](const Array& a, const py::kwargs& kw) {
    const auto cfg = config_from(kw);
    const Image img = to_image(a);
    return without_gil([&] { return denoise(img, cfg.window, cfg.kernel, {cfg.threads}); });
  }, py::arg("image"), "Plain NL-means. Settings: patch_radius, search_radius, kernel, h, h1, h2, ...");

  m.def("despeckle", [](const Array& a, const py::kwargs& kw) {
    const auto cfg = config_from(kw);
    const Image img = to_image(a);
    return without_gil([&] { return despeckle(img, cfg.window, cfg.kernel, cfg.log_offset, {cfg.threads}); });
  }, py::arg("image"), "NL-means in the log domain.");

  m.def("sr_upscale_2x", [](const Array& a, const py::kwargs& kw) {
    const auto cfg = config_from(kw);
    const Image img = to_image(a);
    return without_gil([&] { return sr_upscale_2x(img, cfg.window, cfg.kernel, cfg.sr, {cfg.threads}); });
  }, py::arg("image"));

  m.def("sr_despeckle_upscale", [](const Array& a, const py::kwargs& kw) {
    const auto cfg = config_from(kw);
    const Image img = to_image(a);
    return without_gil([&] { return sr_despeckle_upscale(img, cfg.window, cfg.kernel, cfg.log_offset, cfg.sr, {cfg.threads}, cfg.sr_mode); });
  }, py::arg("image"));

  m.def("combined_sr", [](const Array& a, std::uint64_t seed, bool nlm_features, const py::kwargs& kw) {
    auto cfg = config_from(kw);
    cfg.train.seed = seed;
    const Image img = to_image(a);
    std::vector<double> trace;
    const auto opts = bpnn_options(cfg, nlm_features ? FeatureSource::nlm : FeatureSource::nearest);
    Array out = without_gil([&] { return combined_sr(img, cfg.window, cfg.kernel, cfg.log_offset, cfg.train, opts, &trace); });
    return py::make_tuple(out, trace);
  }, py::arg("image"), py::arg("seed"), py::arg("nlm_features") = true,
     "Self-trained network upscale. Returns (image, per-epoch loss).");

  m.def("psnr", [](const Array& t, const Array& r) { return psnr(to_image(t), to_image(r)); },
        py::arg("test"), py::arg("reference"));
  m.def("enl", [](const Array& a, std::optional<std::tuple<int, int, int, int>> region) -> std::optional<double> {
    const Image img = to_image(a);
    Region r = Region::whole(img);
    if (region) r = {std::get<0>(*region), std::get<1>(*region), std::get<2>(*region), std::get<3>(*region)};
    return enl(img, r);
  }, py::arg("image"), py::arg("region") = py::none(), "region is (row, col, width, height); None means whole image.");

  m.def("run_experiment", [](const Array& clean, std::uint64_t seed, const py::kwargs& kw) {
    auto cfg = config_from(kw);
    cfg.seed = seed;
    const Image img = to_image(clean);
    ExperimentResult result;
    {
      py::gil_scoped_release release;
      result = run_experiment_on(img, cfg);
    }
    py::dict images;
    for (const auto& [name, im] : result.images) images[py::str(name)] = to_array(im);
    return py::make_tuple(report_dict(result.report), images);
  }, py::arg("clean"), py::arg("seed"), "Full protocol on a clean image. Returns (report, images).");

}
