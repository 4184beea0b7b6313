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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxykit/colorspace.hpp"
#include "proxykit/image.hpp"
#include "proxykit/quantizer.hpp"

namespace proxykit {

// A segmented object. `mask` is bbox-local: mask.width() == bbox.w and
// mask.height() == bbox.h, so mask pixels can never leave the box.
struct Detection {
  std::string id;
  Rect bbox;
  Mask mask;
  std::optional<std::string> label;

  std::size_t area() const { return mask.count(); }
  // Frame-space containment test against the mask.
  bool contains(int x, int y) const {
    return bbox.contains(x, y) && mask.at(x - bbox.x, y - bbox.y);
  }
};

// Throws Error(kInvalidArgument) when the mask does not match the bbox or
// the bbox leaves a frame of the given size.
void ValidateDetection(const Detection& d, int frame_width, int frame_height);

// Frame crop of the detection's bbox with its mask.
RasterRegion DetectionRegion(const Raster& frame, const Detection& d);

enum class ReferenceStrategy { kScreenshot, kMsc, kBaselineNone };

std::string_view StrategyName(ReferenceStrategy s);
// Accepts "screenshot", "msc", "baseline" (case-insensitive).
ReferenceStrategy ParseStrategy(std::string_view name);

struct MscCandidate {
  std::string id;
  double distance = 0.0;  // CIEDE2000 between palette means
};

struct ReferenceChoice {
  ReferenceStrategy strategy = ReferenceStrategy::kBaselineNone;
  std::optional<RasterRegion> region;
  std::optional<std::string> source_id;
  std::optional<double> distance;
  // MSC only: every neighbor's distance, in input order.
  std::vector<MscCandidate> candidates;
  // MSC only: the chosen neighbor's quantization, reusable downstream.
  std::optional<QuantizedRegion> quantized;
};

inline constexpr double kDefaultMarginFactor = 3.0;

// Square crop of side margin_factor * max(bbox.w, bbox.h) centered on the
// bbox center, clamped to the frame.
Rect ScreenshotRect(int frame_width, int frame_height, const Rect& bbox,
                    double margin_factor = kDefaultMarginFactor);

// Localized screenshot around the target. The mask selects every crop
// pixel except the target's own mask pixels.
RasterRegion ScreenshotReference(const Raster& frame, const Detection& target,
                                 double margin_factor = kDefaultMarginFactor);

struct Expansion {
  enum class Mode { kFraction, kPixels };
  Mode mode = Mode::kFraction;
  double amount = 0.5;  // per side: fraction of bbox size, or pixels

  static Expansion Fraction(double f) { return {Mode::kFraction, f}; }
  static Expansion Pixels(double px) { return {Mode::kPixels, px}; }
};

// Detections (other than `target`, matched by id) whose bbox intersects the
// target bbox grown on every side. Input order is preserved.
std::vector<Detection> FindNeighbors(const std::vector<Detection>& detections,
                                     const Detection& target,
                                     Expansion expansion = {});

// Index of the smallest distance; ties go to the lexicographically lower id.
std::size_t ArgminCandidate(const std::vector<MscCandidate>& candidates);

// Most-similar-color reference. Quantizes each neighbor and picks the one
// whose palette mean is closest (CIEDE2000) to the target palette mean.
// Throws Error(kNoNeighbors) when `neighbors` is empty.
ReferenceChoice MscReference(const Palette& target_palette, const Raster& frame,
                             const std::vector<Detection>& neighbors,
                             const QuantizeOptions& options = {});
ReferenceChoice MscReference(const Raster& frame, const Detection& target,
                             const std::vector<Detection>& neighbors,
                             const QuantizeOptions& options = {});

// Uncompressed row-major run-length masks: alternating run lengths,
// starting with a (possibly empty) run of unselected pixels.
std::vector<std::uint32_t> EncodeRle(const Mask& mask);
Mask DecodeRle(const std::vector<std::uint32_t>& counts, int width, int height);

}  // namespace proxykit
