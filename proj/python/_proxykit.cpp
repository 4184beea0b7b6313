/* Copyright 2026 The proxykit Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "proxykit/calibration.hpp"
#include "proxykit/colorspace.hpp"
#include "proxykit/enhancer.hpp"
#include "proxykit/error.hpp"
#include "proxykit/gaze.hpp"
#include "proxykit/json_io.hpp"
#include "proxykit/pipeline.hpp"
#include "proxykit/quantizer.hpp"
#include "proxykit/reference.hpp"

namespace py = pybind11;
using namespace proxykit;

namespace {

using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using MaskArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

// Python objects cross the boundary as JSON text.
Json ToCpp(const py::handle& obj) {
  const auto dumps = py::module_::import("json").attr("dumps");
  return ParseJson(dumps(obj).cast<std::string>());
}

py::object ToPy(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Raster RasterFromArray(const ImageArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) {
    throw Error(ErrorCode::kInvalidArgument, "image must be an HxWx3 uint8 array");
  }
  Raster r(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), r.bytes().begin());
  return r;
}

Mask MaskFromArray(const std::optional<MaskArray>& a, const Raster& raster) {
  if (!a) return Mask(raster.width(), raster.height(), true);
  if (a->ndim() != 2 || a->shape(0) != raster.height() || a->shape(1) != raster.width()) {
    throw Error(ErrorCode::kInvalidArgument, "mask must be HxW and match the image");
  }
  Mask m(raster.width(), raster.height());
  const bool* p = a->data();
  for (int y = 0; y < raster.height(); ++y)
    for (int x = 0; x < raster.width(); ++x) m.set(x, y, *p++);
  return m;
}

RasterRegion RegionFromArrays(const ImageArray& image, const std::optional<MaskArray>& mask) {
  Raster r = RasterFromArray(image);
  Mask m = MaskFromArray(mask, r);
  return {std::move(r), std::move(m)};
}

ImageArray ToArray(const Raster& r) {
  ImageArray a({r.height(), r.width(), 3});
  std::copy(r.bytes().begin(), r.bytes().end(), a.mutable_data());
  return a;
}

MaskArray ToArray(const Mask& m) {
  MaskArray a({m.height(), m.width()});
  bool* p = a.mutable_data();
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) *p++ = m.at(x, y);
  return a;
}

EnhancementParams ParamsArg(const py::object& params) {
  return params.is_none() ? EnhancementParams{} : ParamsFromJson(ToCpp(params));
}

LabColor LabArg(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

py::tuple ProxyTuple(const RasterRegion& proxy, Json result) {
  return py::make_tuple(ToArray(proxy.raster), ToArray(proxy.mask), ToPy(result));
}

class PySession {
 public:
  explicit PySession(const py::object& specs, int comparisons_per_param)
      : session_(specs.is_none() ? calibration::DefaultSpecs() : SpecsFromJson(ToCpp(specs)),
                 comparisons_per_param) {}

  py::object Next() const {
    const auto c = session_.Next();
    return ToPy(Json{{"param", c.param},
                     {"param_index", c.param_index},
                     {"comparison_index", c.comparison_index},
                     {"option_a", c.option_a},
                     {"option_b", c.option_b}});
  }
  void Submit(double chosen) { session_.Submit(chosen); }
  bool done() const { return session_.done(); }
  py::dict Values() const {
    py::dict d;
    for (std::size_t i = 0; i < session_.specs().size(); ++i) {
      const auto& fixed = session_.states()[i].fixed;
      d[py::str(session_.specs()[i].name)] = fixed ? py::cast(*fixed) : py::none();
    }
    return d;
  }
  py::object Params(const py::object& base) const {
    return ToPy(ToJson(session_.CurrentParams(ParamsArg(base))));
  }

 private:
  calibration::Session session_;
};

}  // namespace

PYBIND11_MODULE(_proxykit, m) {
  m.doc() = "Colour-enhanced proxies for gaze-selected objects";

  // Raised for every library error; `code` carries the error name.
  // The module keeps its own reference, so the handle stays valid.
  static py::handle error_type = py::exception<Error>(m, "ProxykitError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = error_type(std::string(e.name()) + ": " + e.what());
      instance.attr("code") = std::string(e.name());
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  m.def("srgb_to_lab", [](const std::array<int, 3>& rgb) {
    for (int c : rgb)
      if (c < 0 || c > 255) throw Error(ErrorCode::kInvalidArgument, "channel out of range");
    const LabColor lab = Rgb8ToLab({static_cast<std::uint8_t>(rgb[0]),
                                    static_cast<std::uint8_t>(rgb[1]),
                                    static_cast<std::uint8_t>(rgb[2])});
    return std::array<double, 3>{lab.L, lab.a, lab.b};
  }, py::arg("rgb"), "8-bit sRGB triple to CIE L*a*b* (D65).");

  m.def("lab_to_srgb", [](const std::array<double, 3>& lab) {
    const Rgb8 c = LabToRgb8(LabArg(lab));
    return std::array<int, 3>{c.r, c.g, c.b};
  }, py::arg("lab"));

  m.def("ciede2000", [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return Ciede2000(LabArg(a), LabArg(b));
  }, py::arg("lab1"), py::arg("lab2"));

  m.def("default_params", [] { return ToPy(ToJson(EnhancementParams{})); });
  m.def("identity_params", [] { return ToPy(ToJson(EnhancementParams::Identity())); });

  m.def("quantize",
        [](const ImageArray& image, const std::optional<MaskArray>& mask, int k,
           std::uint64_t seed) {
          QuantizeOptions opt;
          opt.k = k;
          opt.seed = seed;
          const QuantizedRegion q = Quantize(RegionFromArrays(image, mask), opt);
          return py::make_tuple(ToArray(q.raster), ToPy(ToJson(q.palette)));
        },
        py::arg("image"), py::arg("mask") = py::none(), py::arg("k") = kDefaultClusters,
        py::arg("seed") = kDefaultSeed,
        "Returns (quantized image, palette dict with centroids and weights).");

  m.def("palette_distances",
        [](const py::object& target, const py::object& reference) {
          return ToPy(ToJson(ComputePaletteDistances(PaletteFromJson(ToCpp(target)),
                                                     PaletteFromJson(ToCpp(reference)))));
        },
        py::arg("target_palette"), py::arg("reference_palette"));

  m.def("generate_proxy",
        [](const ImageArray& target, const ImageArray& reference,
           const std::optional<MaskArray>& target_mask,
           const std::optional<MaskArray>& reference_mask, const py::object& params,
           std::uint64_t seed, int k) {
          const ProxyResult r =
              GenerateProxy(RegionFromArrays(target, target_mask),
                            RegionFromArrays(reference, reference_mask), ParamsArg(params),
                            seed, k);
          return ProxyTuple(r.proxy, ToJson(r));
        },
        py::arg("target"), py::arg("reference"), py::arg("target_mask") = py::none(),
        py::arg("reference_mask") = py::none(), py::arg("params") = py::none(),
        py::arg("seed") = kDefaultSeed, py::arg("k") = kDefaultClusters,
        "Returns (proxy image, proxy mask, result dict).");

  m.def("run_pipeline",
        [](const ImageArray& frame, const py::object& detections,
           std::optional<std::pair<int, int>> gaze, const std::string& strategy,
           const py::object& params, std::uint64_t seed, int k) {
          StaticDetections backend(DetectionsFromJson(ToCpp(detections)));
          PipelineConfig cfg;
          cfg.strategy = ParseStrategy(strategy);
          cfg.params = ParamsArg(params);
          cfg.seed = seed;
          cfg.k = k;
          std::optional<Pixel> px;
          if (gaze) px = Pixel{gaze->first, gaze->second};
          const PipelineResult r = RunPipeline(RasterFromArray(frame), px, backend, cfg);
          return ProxyTuple(r.proxy.proxy, ToJson(r));
        },
        py::arg("frame"), py::arg("detections"), py::arg("gaze") = py::none(),
        py::arg("strategy") = "msc", py::arg("params") = py::none(),
        py::arg("seed") = kDefaultSeed, py::arg("k") = kDefaultClusters,
        "Gaze None decodes the red gaze dot from the frame.");

  m.def("gaze_metrics",
        [](const std::string& jsonl, const std::array<double, 4>& display,
           std::optional<double> total_s) {
          const gaze::DisplayRect rect{{display[0], display[1]}, display[2], display[3]};
          const auto events = gaze::Classify(ParseGazeJsonl(jsonl));
          return ToPy(ToJson(gaze::Peripherality(events, rect, total_s)));
        },
        py::arg("jsonl"), py::arg("display") = std::array<double, 4>{0, 0, 20, 15},
        py::arg("total_s") = py::none(),
        "Peripherality report for a gaze log given as JSON lines.");

  m.def("aggregate", &calibration::Aggregate, py::arg("values"), py::arg("p") = 0.75,
        "Type-7 quantile of per-participant values.");

  py::class_<PySession>(m, "CalibrationSession")
      .def(py::init<const py::object&, int>(), py::arg("specs") = py::none(),
           py::arg("comparisons_per_param") = calibration::kComparisonsPerParam)
      .def("next", &PySession::Next)
      .def("submit", &PySession::Submit, py::arg("chosen"))
      .def_property_readonly("done", &PySession::done)
      .def("values", &PySession::Values)
      .def("params", &PySession::Params, py::arg("base") = py::none());
}
