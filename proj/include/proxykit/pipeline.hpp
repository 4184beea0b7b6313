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

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxykit/enhancer.hpp"
#include "proxykit/image.hpp"
#include "proxykit/reference.hpp"

namespace proxykit {

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

inline constexpr double kMinDotRedness = 0.2;
inline constexpr double kDotCutFraction = 0.5;

// Locates the overlaid gaze dot. Redness is (R - max(G, B)) / 255; the
// result is the redness-weighted centroid of pixels scoring at least half
// the frame maximum, rounded to the nearest pixel.
// Throws Error(kNoDotFound) when the maximum redness is below 0.2.
Pixel DecodeGazeDot(const Raster& frame);

// Index of the detection whose mask contains `gaze`. Overlaps resolve to
// the smallest mask, then the lower id.
std::optional<std::size_t> ResolveTarget(const std::vector<Detection>& detections,
                                         Pixel gaze);

class SegmentationBackend {
 public:
  virtual ~SegmentationBackend() = default;
  // Implementations must be safe to call concurrently.
  virtual std::vector<Detection> Segment(const Raster& frame) = 0;
  virtual std::string_view name() const = 0;
};

// Returns a fixed detection list; used for inline detections.
class StaticDetections final : public SegmentationBackend {
 public:
  explicit StaticDetections(std::vector<Detection> detections)
      : detections_(std::move(detections)) {}
  std::vector<Detection> Segment(const Raster&) override { return detections_; }
  std::string_view name() const override { return "inline"; }

 private:
  std::vector<Detection> detections_;
};

// Reads a detections JSON sidecar on every call.
class FileStub final : public SegmentationBackend {
 public:
  explicit FileStub(std::filesystem::path path) : path_(std::move(path)) {}
  std::vector<Detection> Segment(const Raster& frame) override;
  std::string_view name() const override { return "file"; }

 private:
  std::filesystem::path path_;
};

inline constexpr double kDefaultBackendTimeoutS = 5.0;

// HTTP segmentation client: POST {base_url}/segment with the frame as an
// image/png body; the reply is a detections JSON array.
// Throws Error(kBackendUnavailable) or Error(kTimeout).
class RemoteModel final : public SegmentationBackend {
 public:
  explicit RemoteModel(std::string base_url,
                       double timeout_s = kDefaultBackendTimeoutS);
  std::vector<Detection> Segment(const Raster& frame) override;
  std::string_view name() const override { return "remote"; }

 private:
  std::string base_url_;
  double timeout_s_;
};

enum class Stage {
  kSegmentation,
  kTargetResolution,
  kNeighborSearch,
  kMscSelection,
  kQuantizeEnhance,
};
inline constexpr std::size_t kStageCount = 5;

std::string_view StageName(Stage stage);

struct StageTimings {
  std::array<double, kStageCount> ms{};

  double& operator[](Stage s) { return ms[static_cast<std::size_t>(s)]; }
  double operator[](Stage s) const { return ms[static_cast<std::size_t>(s)]; }
  double total_ms() const;
  // Share of the accounted total per stage; all zero when nothing was timed.
  std::array<double, kStageCount> fractions() const;
  Stage largest() const;
};

inline constexpr double kDefaultBurstMs = 2000.0;

struct PipelineConfig {
  ReferenceStrategy strategy = ReferenceStrategy::kMsc;
  EnhancementParams params;
  std::uint64_t seed = kDefaultSeed;
  int k = kDefaultClusters;
  Expansion expansion;
  double margin_factor = kDefaultMarginFactor;
  double burst_ms = kDefaultBurstMs;
};

struct PipelineResult {
  Pixel gaze;
  Detection target;
  std::vector<std::string> neighbor_ids;
  ReferenceChoice reference;
  ProxyResult proxy;
  StageTimings timings;
  double burst_ms = kDefaultBurstMs;

  bool skipped() const { return proxy.skipped(); }
};

// Segment, resolve the gazed target, find neighbors, select the reference
// and generate the proxy. `gaze` of nullopt decodes the red dot from the
// frame. MSC without neighbors returns a skipped, quantize-only proxy.
// Throws Error(kNoTarget) when the gaze hits no mask; backend errors are
// rethrown with the stage name prefixed to the message.
PipelineResult RunPipeline(const Raster& frame, std::optional<Pixel> gaze,
                           SegmentationBackend& backend,
                           const PipelineConfig& config = {});

// Proxy as an RGBA PNG: target bbox crop with the mask as alpha.
std::vector<std::uint8_t> EncodeProxyPng(const RasterRegion& proxy);

// Token bucket; `now` is injectable for tests.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;

  TokenBucket(double rate_per_s, double capacity);
  bool TryAcquire(Clock::time_point now = Clock::now());

 private:
  std::mutex mu_;
  double rate_;
  double capacity_;
  double tokens_;
  std::optional<Clock::time_point> last_;
};

}  // namespace proxykit
