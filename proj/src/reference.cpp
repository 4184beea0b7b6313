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

#include "proxykit/reference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "proxykit/error.hpp"

namespace proxykit {

void ValidateDetection(const Detection& d, int frame_width, int frame_height) {
  if (d.bbox.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "detection " + d.id + ": empty bbox");
  }
  if (d.mask.width() != d.bbox.w || d.mask.height() != d.bbox.h) {
    throw Error(ErrorCode::kInvalidArgument,
                "detection " + d.id + ": mask size does not match bbox");
  }
  if (d.bbox.x < 0 || d.bbox.y < 0 || d.bbox.x + d.bbox.w > frame_width ||
      d.bbox.y + d.bbox.h > frame_height) {
    throw Error(ErrorCode::kInvalidArgument,
                "detection " + d.id + ": bbox outside frame");
  }
}

RasterRegion DetectionRegion(const Raster& frame, const Detection& d) {
  ValidateDetection(d, frame.width(), frame.height());
  return {frame.crop(d.bbox), d.mask};
}

std::string_view StrategyName(ReferenceStrategy s) {
  switch (s) {
    case ReferenceStrategy::kScreenshot: return "screenshot";
    case ReferenceStrategy::kMsc: return "msc";
    case ReferenceStrategy::kBaselineNone: return "baseline";
  }
  return "baseline";
}

ReferenceStrategy ParseStrategy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "screenshot") return ReferenceStrategy::kScreenshot;
  if (lower == "msc") return ReferenceStrategy::kMsc;
  if (lower == "baseline" || lower == "none") {
    return ReferenceStrategy::kBaselineNone;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown strategy '" + std::string(name) + "'");
}

Rect ScreenshotRect(int frame_width, int frame_height, const Rect& bbox,
                    double margin_factor) {
  const double side = margin_factor * std::max(bbox.w, bbox.h);
  const double cx = bbox.x + bbox.w / 2.0;
  const double cy = bbox.y + bbox.h / 2.0;
  const int x0 = static_cast<int>(std::floor(cx - side / 2.0));
  const int y0 = static_cast<int>(std::floor(cy - side / 2.0));
  const int x1 = static_cast<int>(std::ceil(cx + side / 2.0));
  const int y1 = static_cast<int>(std::ceil(cy + side / 2.0));
  return Rect{x0, y0, x1 - x0, y1 - y0}.intersect(
      {0, 0, frame_width, frame_height});
}

RasterRegion ScreenshotReference(const Raster& frame, const Detection& target,
                                 double margin_factor) {
  ValidateDetection(target, frame.width(), frame.height());
  const Rect crop =
      ScreenshotRect(frame.width(), frame.height(), target.bbox, margin_factor);
  Mask mask(crop.w, crop.h, true);
  for (int y = 0; y < crop.h; ++y) {
    for (int x = 0; x < crop.w; ++x) {
      if (target.contains(crop.x + x, crop.y + y)) mask.set(x, y, false);
    }
  }
  return {frame.crop(crop), std::move(mask)};
}

std::vector<Detection> FindNeighbors(const std::vector<Detection>& detections,
                                     const Detection& target,
                                     Expansion expansion) {
  const double grow_x = expansion.mode == Expansion::Mode::kFraction
                            ? expansion.amount * target.bbox.w
                            : expansion.amount;
  const double grow_y = expansion.mode == Expansion::Mode::kFraction
                            ? expansion.amount * target.bbox.h
                            : expansion.amount;
  const double x0 = target.bbox.x - grow_x;
  const double y0 = target.bbox.y - grow_y;
  const double x1 = target.bbox.x + target.bbox.w + grow_x;
  const double y1 = target.bbox.y + target.bbox.h + grow_y;

  std::vector<Detection> out;
  for (const auto& d : detections) {
    if (d.id == target.id || d.bbox.empty()) continue;
    const bool overlaps = d.bbox.x < x1 && x0 < d.bbox.x + d.bbox.w &&
                          d.bbox.y < y1 && y0 < d.bbox.y + d.bbox.h;
    if (overlaps) out.push_back(d);
  }
  return out;
}

std::size_t ArgminCandidate(const std::vector<MscCandidate>& candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kNoNeighbors, "no neighbor candidates");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    const auto& b = candidates[best];
    if (c.distance < b.distance || (c.distance == b.distance && c.id < b.id)) {
      best = i;
    }
  }
  return best;
}

ReferenceChoice MscReference(const Palette& target_palette, const Raster& frame,
                             const std::vector<Detection>& neighbors,
                             const QuantizeOptions& options) {
  if (neighbors.empty()) {
    throw Error(ErrorCode::kNoNeighbors, "target has no neighboring objects");
  }
  const LabColor target_mean = PaletteMeanLab(target_palette);
  ReferenceChoice choice;
  choice.strategy = ReferenceStrategy::kMsc;
  std::vector<QuantizedRegion> quantized;
  quantized.reserve(neighbors.size());
  for (const auto& n : neighbors) {
    quantized.push_back(Quantize(DetectionRegion(frame, n), options));
    choice.candidates.push_back(
        {n.id, Ciede2000(target_mean, PaletteMeanLab(quantized.back().palette))});
  }
  const std::size_t best = ArgminCandidate(choice.candidates);
  choice.source_id = neighbors[best].id;
  choice.distance = choice.candidates[best].distance;
  choice.region = DetectionRegion(frame, neighbors[best]);
  choice.quantized = std::move(quantized[best]);
  return choice;
}

ReferenceChoice MscReference(const Raster& frame, const Detection& target,
                             const std::vector<Detection>& neighbors,
                             const QuantizeOptions& options) {
  const QuantizedRegion qt = Quantize(DetectionRegion(frame, target), options);
  return MscReference(qt.palette, frame, neighbors, options);
}

std::vector<std::uint32_t> EncodeRle(const Mask& mask) {
  std::vector<std::uint32_t> counts;
  bool current = false;
  std::uint32_t run = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const bool v = mask.at(x, y);
      if (v != current) {
        counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return counts;
}

Mask DecodeRle(const std::vector<std::uint32_t>& counts, int width, int height) {
  Mask mask(width, height);
  const std::size_t total = static_cast<std::size_t>(width) * height;
  std::size_t pos = 0;
  bool value = false;
  for (std::uint32_t run : counts) {
    if (pos + run > total) {
      throw Error(ErrorCode::kParse, "RLE runs exceed mask size");
    }
    for (std::uint32_t i = 0; i < run; ++i, ++pos) {
      if (value) {
        mask.set(static_cast<int>(pos % width), static_cast<int>(pos / width),
                 true);
      }
    }
    value = !value;
  }
  if (pos != total) {
    throw Error(ErrorCode::kParse, "RLE runs do not cover the mask");
  }
  return mask;
}

}  // namespace proxykit
