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

#include "proxykit/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "httplib.h"
#include "proxykit/error.hpp"
#include "proxykit/json_io.hpp"

namespace proxykit {
namespace {

using SteadyClock = std::chrono::steady_clock;

class StageTimer {
 public:
  StageTimer(StageTimings& timings, Stage stage)
      : timings_(timings), stage_(stage), start_(SteadyClock::now()) {}
  ~StageTimer() {
    timings_[stage_] +=
        std::chrono::duration<double, std::milli>(SteadyClock::now() - start_)
            .count();
  }

 private:
  StageTimings& timings_;
  Stage stage_;
  SteadyClock::time_point start_;
};

}  // namespace

Pixel DecodeGazeDot(const Raster& frame) {
  int max_redness = 0;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const Rgb8 c = frame.at(x, y);
      max_redness = std::max(max_redness, c.r - std::max<int>(c.g, c.b));
    }
  }
  if (max_redness < kMinDotRedness * 255.0) {
    throw Error(ErrorCode::kNoDotFound, "no red gaze dot in frame");
  }
  const double cut = kDotCutFraction * max_redness;
  double sum = 0.0, sx = 0.0, sy = 0.0;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const Rgb8 c = frame.at(x, y);
      const double r = c.r - std::max<int>(c.g, c.b);
      if (r < cut) continue;
      sum += r;
      sx += r * x;
      sy += r * y;
    }
  }
  return {static_cast<int>(std::lround(sx / sum)),
          static_cast<int>(std::lround(sy / sum))};
}

std::optional<std::size_t> ResolveTarget(const std::vector<Detection>& detections,
                                         Pixel gaze) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    if (!d.contains(gaze.x, gaze.y)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const Detection& b = detections[*best];
    if (d.area() < b.area() || (d.area() == b.area() && d.id < b.id)) best = i;
  }
  return best;
}

std::vector<Detection> FileStub::Segment(const Raster&) {
  return DetectionsFromJson(LoadJson(path_));
}

RemoteModel::RemoteModel(std::string base_url, double timeout_s)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.rfind("http://", 0) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "backend URL must start with http://: " + base_url_);
  }
  if (!(timeout_s_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "backend timeout must be positive");
  }
}

std::vector<Detection> RemoteModel::Segment(const Raster& frame) {
  // Split "http://host:port/prefix" into the client origin and path prefix.
  const std::size_t path_at = base_url_.find('/', std::string("http://").size());
  const std::string origin =
      path_at == std::string::npos ? base_url_ : base_url_.substr(0, path_at);
  const std::string prefix =
      path_at == std::string::npos ? "" : base_url_.substr(path_at);

  httplib::Client client(origin);
  const auto sec = static_cast<time_t>(timeout_s_);
  const auto usec = static_cast<time_t>((timeout_s_ - sec) * 1e6);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);

  const auto png = EncodePng(frame);
  const auto start = SteadyClock::now();
  auto res = client.Post(prefix + "/segment",
                         reinterpret_cast<const char*>(png.data()), png.size(),
                         "image/png");
  if (!res) {
    const double elapsed =
        std::chrono::duration<double>(SteadyClock::now() - start).count();
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= 0.9 * timeout_s_)) {
      throw Error(ErrorCode::kTimeout, "segmentation backend timed out after " +
                                           std::to_string(timeout_s_) + " s");
    }
    throw Error(ErrorCode::kBackendUnavailable,
                "segmentation backend unreachable: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                "segmentation backend returned HTTP " + std::to_string(res->status));
  }
  return DetectionsFromJson(ParseJson(res->body));
}

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kSegmentation: return "segmentation";
    case Stage::kTargetResolution: return "target_resolution";
    case Stage::kNeighborSearch: return "neighbor_search";
    case Stage::kMscSelection: return "msc_selection";
    case Stage::kQuantizeEnhance: return "quantize_enhance";
  }
  return "segmentation";
}

double StageTimings::total_ms() const {
  double total = 0.0;
  for (double v : ms) total += v;
  return total;
}

std::array<double, kStageCount> StageTimings::fractions() const {
  std::array<double, kStageCount> f{};
  const double total = total_ms();
  if (total <= 0.0) return f;
  for (std::size_t i = 0; i < kStageCount; ++i) f[i] = ms[i] / total;
  return f;
}

Stage StageTimings::largest() const {
  return static_cast<Stage>(std::max_element(ms.begin(), ms.end()) - ms.begin());
}

PipelineResult RunPipeline(const Raster& frame, std::optional<Pixel> gaze,
                           SegmentationBackend& backend,
                           const PipelineConfig& config) {
  config.params.Validate();
  PipelineResult result;
  result.burst_ms = config.burst_ms;
  StageTimings& timings = result.timings;

  std::vector<Detection> detections;
  {
    StageTimer timer(timings, Stage::kSegmentation);
    try {
      detections = backend.Segment(frame);
      for (const auto& d : detections) {
        ValidateDetection(d, frame.width(), frame.height());
      }
    } catch (const Error& e) {
      throw Error(e.code(), "segmentation: " + std::string(e.what()));
    }
  }

  {
    StageTimer timer(timings, Stage::kTargetResolution);
    result.gaze = gaze ? *gaze : DecodeGazeDot(frame);
    const auto index = ResolveTarget(detections, result.gaze);
    if (!index) {
      throw Error(ErrorCode::kNoTarget,
                  "gaze (" + std::to_string(result.gaze.x) + ", " +
                      std::to_string(result.gaze.y) + ") hits no detection");
    }
    result.target = detections[*index];
  }

  std::vector<Detection> neighbors;
  {
    StageTimer timer(timings, Stage::kNeighborSearch);
    neighbors = FindNeighbors(detections, result.target, config.expansion);
    for (const auto& n : neighbors) result.neighbor_ids.push_back(n.id);
  }

  QuantizeOptions qopts;
  qopts.k = config.k;
  qopts.seed = config.seed;
  QuantizedRegion target;
  {
    StageTimer timer(timings, Stage::kQuantizeEnhance);
    target = Quantize(DetectionRegion(frame, result.target), qopts);
  }

  ReferenceChoice& ref = result.reference;
  ref.strategy = config.strategy;
  switch (config.strategy) {
    case ReferenceStrategy::kBaselineNone: {
      StageTimer timer(timings, Stage::kQuantizeEnhance);
      result.proxy = QuantizeOnlyProxy(std::move(target), SkipReason::kNoReference);
      break;
    }
    case ReferenceStrategy::kScreenshot: {
      {
        StageTimer timer(timings, Stage::kMscSelection);
        ref.region = ScreenshotReference(frame, result.target, config.margin_factor);
      }
      StageTimer timer(timings, Stage::kQuantizeEnhance);
      const QuantizedRegion reference = Quantize(*ref.region, qopts);
      result.proxy = GenerateProxy(std::move(target), reference, config.params);
      break;
    }
    case ReferenceStrategy::kMsc: {
      if (neighbors.empty()) {
        StageTimer timer(timings, Stage::kQuantizeEnhance);
        result.proxy = QuantizeOnlyProxy(std::move(target), SkipReason::kNoNeighbors);
        break;
      }
      {
        StageTimer timer(timings, Stage::kMscSelection);
        ref = MscReference(target.palette, frame, neighbors, qopts);
      }
      StageTimer timer(timings, Stage::kQuantizeEnhance);
      result.proxy = GenerateProxy(std::move(target), *ref.quantized, config.params);
      break;
    }
  }
  return result;
}

std::vector<std::uint8_t> EncodeProxyPng(const RasterRegion& proxy) {
  return EncodePng(proxy.raster, &proxy.mask);
}

TokenBucket::TokenBucket(double rate_per_s, double capacity)
    : rate_(rate_per_s), capacity_(capacity), tokens_(capacity) {
  if (!(rate_per_s > 0.0) || !(capacity >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "token bucket needs rate > 0 and capacity >= 1");
  }
}

bool TokenBucket::TryAcquire(Clock::time_point now) {
  std::lock_guard lock(mu_);
  if (last_ && now > *last_) {
    const double elapsed = std::chrono::duration<double>(now - *last_).count();
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
  }
  if (!last_ || now > *last_) last_ = now;
  if (tokens_ < 1.0) return false;
  tokens_ -= 1.0;
  return true;
}

}  // namespace proxykit
