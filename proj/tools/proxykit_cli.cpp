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

// Command-line front end: one subcommand per processing stage plus the two
// HTTP services.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "proxykit/calibration.hpp"
#include "proxykit/enhancer.hpp"
#include "proxykit/error.hpp"
#include "proxykit/gaze.hpp"
#include "proxykit/image.hpp"
#include "proxykit/json_io.hpp"
#include "proxykit/pipeline.hpp"
#include "proxykit/quantizer.hpp"
#include "proxykit/reference.hpp"
#include "proxykit/server.hpp"

namespace {

using namespace proxykit;

constexpr int kExitError = 1;

struct Output {
  std::string json_path;  // stdout when empty
  bool omit_timings = false;
};

void StripTimings(Json& j) {
  j.erase("timings");
  j.erase("enhancer_timings");
}

void Emit(Json j, const Output& out) {
  if (out.omit_timings) StripTimings(j);
  const std::string text = j.dump(2) + "\n";
  if (out.json_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.json_path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + out.json_path);
  f << text;
}

std::vector<double> SplitNumbers(const std::string& text, std::size_t n,
                                 const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::kInvalidArgument, what + ": bad number '" + item + "'");
    }
    v.push_back(x);
  }
  if (v.size() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                what + ": expected " + std::to_string(n) + " comma-separated values");
  }
  return v;
}

// Mask precedence: explicit mask file, then the image's alpha, then the
// whole frame.
RasterRegion LoadRegion(const std::string& image, const std::string& mask) {
  DecodedImage d = ReadPng(image);
  Mask m;
  if (!mask.empty()) {
    m = ReadMaskPng(mask);
    if (m.width() != d.raster.width() || m.height() != d.raster.height()) {
      throw Error(ErrorCode::kInvalidArgument, "mask size does not match " + image);
    }
  } else if (d.alpha) {
    m = *d.alpha;
  } else {
    m = Mask(d.raster.width(), d.raster.height(), true);
  }
  return {std::move(d.raster), std::move(m)};
}

EnhancementParams LoadParamsOrDefault(const std::string& path) {
  return path.empty() ? EnhancementParams{} : LoadParams(path);
}

Palette LoadPalette(const std::string& path) {
  const Json j = LoadJson(path);
  return PaletteFromJson(j.contains("palette") ? j["palette"] : j);
}

std::vector<Detection> LoadDetections(const std::string& path) {
  return DetectionsFromJson(LoadJson(path));
}

// Blocks SIGINT/SIGTERM for all threads and stops `service` when one arrives.
void ServeUntilSignal(HttpService& service, const BindAddress& bind) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  const int port = service.Bind(bind.host, bind.port);
  std::cerr << Json{{"listening", bind.host + ":" + std::to_string(port)}}.dump()
            << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    service.Stop();
  });
  service.Run();
  // Run can also return on its own; wake the waiter so it can be joined.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
}

struct QuantizeArgs {
  std::string image, mask, out;
  int k = kDefaultClusters;
  std::uint64_t seed = kDefaultSeed;
};

void RunQuantize(const QuantizeArgs& a, const Output& out) {
  const RasterRegion region = LoadRegion(a.image, a.mask);
  QuantizeOptions opt;
  opt.k = a.k;
  opt.seed = a.seed;
  const QuantizedRegion q = Quantize(region, opt);
  WriteFileBytes(a.out, EncodeProxyPng(q.region()));
  Emit({{"palette", ToJson(q.palette)},
        {"reconstruction_error", ReconstructionError(region, q)},
        {"out", a.out}},
       out);
}

struct EnhanceArgs {
  std::string target, target_mask, reference, reference_mask, params, out;
  int k = kDefaultClusters;
  std::uint64_t seed = kDefaultSeed;
};

void RunEnhance(const EnhanceArgs& a, const Output& out) {
  const RasterRegion target = LoadRegion(a.target, a.target_mask);
  const RasterRegion reference = LoadRegion(a.reference, a.reference_mask);
  const ProxyResult r =
      GenerateProxy(target, reference, LoadParamsOrDefault(a.params), a.seed, a.k);
  WriteFileBytes(a.out, EncodeProxyPng(r.proxy));
  Json j = ToJson(r);
  j["out"] = a.out;
  Emit(j, out);
}

void RunAnalyze(const std::string& target, const std::string& reference,
                const Output& out) {
  const Palette t = LoadPalette(target);
  const Palette r = LoadPalette(reference);
  const SharedColor shared = FindSharedDominantColor(t, r);
  Json j = ToJson(ComputePaletteDistances(t, r));
  j["shared_color"] = {{"index", shared.index},
                       {"lab", ToJson(shared.color)},
                       {"score", shared.score}};
  Emit(j, out);
}

struct MscArgs {
  std::string frame, detections, target_id;
  double expand = 0.5;
  int k = kDefaultClusters;
  std::uint64_t seed = kDefaultSeed;
};

void RunMsc(const MscArgs& a, const Output& out) {
  const Raster frame = ReadPng(a.frame).raster;
  const auto detections = LoadDetections(a.detections);
  const Detection* target = nullptr;
  for (const auto& d : detections) {
    ValidateDetection(d, frame.width(), frame.height());
    if (d.id == a.target_id) target = &d;
  }
  if (!target) throw Error(ErrorCode::kNoTarget, "no detection with id " + a.target_id);
  const auto neighbors = FindNeighbors(detections, *target, Expansion::Fraction(a.expand));
  QuantizeOptions opt;
  opt.k = a.k;
  opt.seed = a.seed;
  const ReferenceChoice choice = MscReference(frame, *target, neighbors, opt);
  Json j = ToJson(choice);
  j["target_id"] = a.target_id;
  j["reference_id"] = j["source_id"];
  Emit(j, out);
}

struct PipelineArgs {
  std::string frame, gaze = "decode", detections, backend, strategy = "msc", params,
                     out;
  double timeout_s = kDefaultBackendTimeoutS;
  int k = kDefaultClusters;
  std::uint64_t seed = kDefaultSeed;
};

void RunPipelineCommand(const PipelineArgs& a, const Output& out) {
  if (a.detections.empty() == a.backend.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "exactly one of --detections and --backend is required");
  }
  const Raster frame = ReadPng(a.frame).raster;
  std::optional<Pixel> gaze;
  if (a.gaze != "decode") {
    const auto xy = SplitNumbers(a.gaze, 2, "--gaze");
    gaze = Pixel{static_cast<int>(xy[0]), static_cast<int>(xy[1])};
  }
  std::unique_ptr<SegmentationBackend> backend;
  if (!a.detections.empty()) {
    backend = std::make_unique<FileStub>(a.detections);
  } else {
    backend = std::make_unique<RemoteModel>(a.backend, a.timeout_s);
  }
  PipelineConfig cfg;
  cfg.strategy = ParseStrategy(a.strategy);
  cfg.params = LoadParamsOrDefault(a.params);
  cfg.seed = a.seed;
  cfg.k = a.k;
  const PipelineResult r = RunPipeline(frame, gaze, *backend, cfg);
  Json j = ToJson(r);
  if (!a.out.empty()) {
    WriteFileBytes(a.out, EncodeProxyPng(r.proxy.proxy));
    j["out"] = a.out;
  }
  Emit(j, out);
}

struct GazeArgs {
  std::string log, display = "0,0,20,15";
  gaze::ClassifierConfig classifier;
  std::optional<double> total_s;
  bool events = false;
};

void RunGazeMetrics(const GazeArgs& a, const Output& out) {
  std::ifstream in(a.log, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + a.log);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto samples = ParseGazeJsonl(ss.str());
  const auto d = SplitNumbers(a.display, 4, "--display");
  const gaze::DisplayRect rect{{d[0], d[1]}, d[2], d[3]};
  auto events = gaze::Classify(samples, a.classifier);
  Json j = ToJson(gaze::Peripherality(events, rect, a.total_s));
  if (a.events) {
    gaze::AssignZones(events, rect);
    Json list = Json::array();
    for (const auto& e : events) list.push_back(ToJson(e));
    j["events"] = list;
  }
  Emit(j, out);
}

struct ServeArgs {
  std::string bind = "127.0.0.1:8080", params, detections, backend;
  double rate = 10.0, burst = 10.0;
  int k = kDefaultClusters;
  std::uint64_t seed = kDefaultSeed;
};

void RunServe(const ServeArgs& a) {
  ProxyServiceConfig cfg;
  cfg.params = LoadParamsOrDefault(a.params);
  cfg.seed = a.seed;
  cfg.k = a.k;
  cfg.rate_limit_per_s = a.rate;
  cfg.burst = a.burst;
  if (!a.detections.empty() && !a.backend.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--detections and --backend are exclusive");
  }
  if (!a.detections.empty()) cfg.backend = std::make_shared<FileStub>(a.detections);
  if (!a.backend.empty()) cfg.backend = std::make_shared<RemoteModel>(a.backend);
  const BindAddress bind = ParseBindAddress(a.bind);
  ProxyService service(std::move(cfg));
  ServeUntilSignal(service, bind);
}

struct CalibrateArgs {
  std::string bind = "127.0.0.1:8081", specs, params, static_dir;
};

void RunCalibrateServe(const CalibrateArgs& a) {
  CalibrationServiceConfig cfg;
  if (!a.specs.empty()) cfg.specs = SpecsFromJson(LoadJson(a.specs));
  calibration::ValidateSpecs(cfg.specs);
  cfg.base = LoadParamsOrDefault(a.params);
  if (!a.static_dir.empty()) cfg.static_dir = a.static_dir;
  const BindAddress bind = ParseBindAddress(a.bind);
  CalibrationService service(std::move(cfg));
  ServeUntilSignal(service, bind);
}

void ReportError(const std::string& code, const std::string& message) {
  std::cerr << Json{{"error", code}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Colour-enhanced proxy generation for gaze-selected objects."};
  app.require_subcommand(1);
  Output out;
  app.add_option("--json", out.json_path, "Write the JSON result here instead of stdout");
  app.add_flag("--no-timings", out.omit_timings,
               "Drop wall-clock timing fields so output is byte-reproducible");
  std::function<void()> action;

  QuantizeArgs qa;
  auto* quantize = app.add_subcommand("quantize", "Quantize a masked region into a palette");
  quantize->add_option("--image", qa.image, "Input PNG")->required()->check(CLI::ExistingFile);
  quantize->add_option("--mask", qa.mask, "Mask PNG (nonzero = selected); default: alpha")
      ->check(CLI::ExistingFile);
  quantize->add_option("--k", qa.k, "Number of colour clusters")->capture_default_str();
  quantize->add_option("--seed", qa.seed, "Clustering seed")->capture_default_str();
  quantize->add_option("--out", qa.out, "Output quantized PNG (RGBA)")->required();
  quantize->callback([&] { action = [&] { RunQuantize(qa, out); }; });

  EnhanceArgs ea;
  auto* enhance = app.add_subcommand("enhance", "Generate a proxy of target against reference");
  enhance->add_option("--target", ea.target, "Target PNG")->required()->check(CLI::ExistingFile);
  enhance->add_option("--target-mask", ea.target_mask, "Target mask PNG")
      ->check(CLI::ExistingFile);
  enhance->add_option("--reference", ea.reference, "Reference PNG")
      ->required()
      ->check(CLI::ExistingFile);
  enhance->add_option("--reference-mask", ea.reference_mask, "Reference mask PNG")
      ->check(CLI::ExistingFile);
  enhance->add_option("--params", ea.params, "Enhancement parameter JSON")
      ->envname("PROXYKIT_PARAMS")
      ->check(CLI::ExistingFile);
  enhance->add_option("--k", ea.k, "Number of colour clusters")->capture_default_str();
  enhance->add_option("--seed", ea.seed, "Clustering seed")->capture_default_str();
  enhance->add_option("--out", ea.out, "Output proxy PNG (RGBA)")->required();
  enhance->callback([&] { action = [&] { RunEnhance(ea, out); }; });

  std::string target_palette, reference_palette;
  auto* analyze = app.add_subcommand("analyze", "Distances between two palettes");
  analyze->add_option("--target-palette", target_palette, "Palette JSON")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--reference-palette", reference_palette, "Palette JSON")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->callback(
      [&] { action = [&] { RunAnalyze(target_palette, reference_palette, out); }; });

  MscArgs ma;
  auto* msc = app.add_subcommand("msc", "Pick the most similar neighbouring object");
  msc->add_option("--frame", ma.frame, "Frame PNG")->required()->check(CLI::ExistingFile);
  msc->add_option("--detections", ma.detections, "Detections JSON")
      ->required()
      ->check(CLI::ExistingFile);
  msc->add_option("--target-id", ma.target_id, "Detection id of the target")->required();
  msc->add_option("--expand", ma.expand, "Neighbour search expansion per side (fraction)")
      ->capture_default_str();
  msc->add_option("--k", ma.k, "Number of colour clusters")->capture_default_str();
  msc->add_option("--seed", ma.seed, "Clustering seed")->capture_default_str();
  msc->callback([&] { action = [&] { RunMsc(ma, out); }; });

  PipelineArgs pa;
  auto* pipeline = app.add_subcommand("pipeline", "Frame and gaze to proxy, end to end");
  pipeline->add_option("--frame", pa.frame, "Frame PNG")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--gaze", pa.gaze, "Gaze pixel as x,y, or 'decode' to find the red dot")
      ->capture_default_str();
  pipeline->add_option("--detections", pa.detections, "Detections JSON (file backend)")
      ->check(CLI::ExistingFile);
  pipeline->add_option("--backend", pa.backend, "Segmentation service base URL");
  pipeline->add_option("--timeout", pa.timeout_s, "Segmentation request timeout (s)")
      ->capture_default_str();
  pipeline->add_option("--strategy", pa.strategy, "msc, screenshot or baseline")
      ->capture_default_str();
  pipeline->add_option("--params", pa.params, "Enhancement parameter JSON")
      ->envname("PROXYKIT_PARAMS")
      ->check(CLI::ExistingFile);
  pipeline->add_option("--k", pa.k, "Number of colour clusters")->capture_default_str();
  pipeline->add_option("--seed", pa.seed, "Clustering seed")->capture_default_str();
  pipeline->add_option("--out", pa.out, "Output proxy PNG (RGBA)");
  pipeline->callback([&] { action = [&] { RunPipelineCommand(pa, out); }; });

  GazeArgs ga;
  auto* metrics = app.add_subcommand("gaze-metrics", "World/display time split of a gaze log");
  metrics->add_option("--log", ga.log, "Gaze samples, one JSON object per line")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--display", ga.display, "Display rect in degrees: cx,cy,w,h")
      ->capture_default_str();
  metrics->add_option("--velocity", ga.classifier.velocity_threshold_deg_per_s,
                      "Saccade velocity threshold (deg/s)")
      ->capture_default_str();
  metrics->add_option("--dispersion", ga.classifier.dispersion_threshold_deg,
                      "Fixation dispersion threshold (deg)")
      ->capture_default_str();
  metrics->add_option("--min-fixation", ga.classifier.min_fixation_ms,
                      "Minimum fixation duration (ms)")
      ->capture_default_str();
  metrics->add_option("--max-saccade", ga.classifier.max_saccade_ms,
                      "Maximum saccade duration (ms)")
      ->capture_default_str();
  metrics->add_option("--total-s", ga.total_s, "Session length (s); default: event span");
  metrics->add_flag("--events", ga.events, "Include the classified event list");
  metrics->callback([&] { action = [&] { RunGazeMetrics(ga, out); }; });

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Run the proxy HTTP service");
  serve->add_option("--bind", sa.bind, "host:port")
      ->envname("PROXYKIT_BIND")
      ->capture_default_str();
  serve->add_option("--params", sa.params, "Enhancement parameter JSON")
      ->envname("PROXYKIT_PARAMS")
      ->check(CLI::ExistingFile);
  serve->add_option("--detections", sa.detections, "Detections JSON used for every frame")
      ->check(CLI::ExistingFile);
  serve->add_option("--backend", sa.backend, "Segmentation service base URL");
  serve->add_option("--rate", sa.rate, "Requests per second")->capture_default_str();
  serve->add_option("--burst", sa.burst, "Rate limiter burst size")->capture_default_str();
  serve->add_option("--k", sa.k, "Number of colour clusters")->capture_default_str();
  serve->add_option("--seed", sa.seed, "Clustering seed")->capture_default_str();
  serve->callback([&] { action = [&] { RunServe(sa); }; });

  CalibrateArgs ca;
  auto* calibrate = app.add_subcommand("calibrate-serve", "Run the calibration HTTP service");
  calibrate->add_option("--bind", ca.bind, "host:port")
      ->envname("PROXYKIT_CALIBRATION_BIND")
      ->capture_default_str();
  calibrate->add_option("--specs", ca.specs, "Parameter spec JSON")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--params", ca.params, "Base enhancement parameter JSON")
      ->envname("PROXYKIT_PARAMS")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--static-dir", ca.static_dir, "Directory served at /")
      ->check(CLI::ExistingDirectory);
  calibrate->callback([&] { action = [&] { RunCalibrateServe(ca); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ReportError("Usage", e.what());
    return e.get_exit_code() != 0 ? e.get_exit_code() : kExitError;
  }
  try {
    action();
  } catch (const Error& e) {
    ReportError(std::string(e.name()), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    ReportError("Internal", e.what());
    return kExitError;
  }
  return 0;
}
