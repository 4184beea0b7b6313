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

#include "proxykit/enhancer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "proxykit/clahe.hpp"
#include "proxykit/error.hpp"

namespace proxykit {
namespace {

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double MillisSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

void RequireRange(double v, double lo, double hi, const char* name) {
  if (!(v >= lo && v <= hi)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " out of range [" + std::to_string(lo) +
                    ", " + std::to_string(hi) + "]");
  }
}

double WeightedMeanL(const Palette& p) { return PaletteMeanLab(p).L; }

}  // namespace

std::string_view SkipReasonName(SkipReason reason) {
  switch (reason) {
    case SkipReason::kNone: return "None";
    case SkipReason::kDarkerTarget: return "DarkerTarget";
    case SkipReason::kBelowThreshold: return "BelowThreshold";
    case SkipReason::kNoNeighbors: return "NoNeighbors";
    case SkipReason::kNoReference: return "NoReference";
  }
  return "None";
}

EnhancementParams EnhancementParams::Identity() {
  EnhancementParams p;
  p.max_luminance = 1.0;
  p.max_sat_boost = 1.0;
  p.ab_push = 0.0;
  p.gamma = 1.0;
  p.clahe_clip = 0.0;
  return p;
}

void EnhancementParams::Validate() const {
  RequireRange(max_luminance, 1.0, 8.0, "max_luminance");
  RequireRange(max_sat_boost, 1.0, 16.0, "max_sat_boost");
  RequireRange(ab_push, 0.0, 60.0, "ab_push");
  RequireRange(skip_delta_e, 0.0, std::numeric_limits<double>::max(),
               "skip_delta_e");
  RequireRange(gamma, 1e-3, 10.0, "gamma");
  RequireRange(clahe_clip, 0.0, 256.0, "clahe_clip");
  if (clahe_tiles < 1 || clahe_tiles > 64) {
    throw Error(ErrorCode::kInvalidArgument, "clahe_tiles out of range [1, 64]");
  }
  if (!(boost_saturation_distance > 0.0) || !(boost_global_scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "boost distances must be positive");
  }
}

PaletteDistances ComputePaletteDistances(const Palette& target,
                                         const Palette& reference) {
  PaletteDistances d;
  for (int i = 0; i < target.k(); ++i) {
    const LabColor& ct = target.centroids[i];
    for (int j = 0; j < reference.k(); ++j) {
      const LabColor& cr = reference.centroids[j];
      const double w = target.weights[i] * reference.weights[j];
      d.delta_e_total += w * Ciede2000(ct, cr);
      d.delta_l += w * std::fabs(ct.L - cr.L);
      d.delta_c += w * std::fabs(Chroma(ct) - Chroma(cr));
    }
  }
  const double denom = d.delta_l + d.delta_c;
  d.alpha = denom > 0.0 ? d.delta_c / denom : 0.5;
  return d;
}

SharedColor FindSharedDominantColor(const Palette& target,
                                    const Palette& reference) {
  SharedColor best{0, reference.centroids.at(0), -1.0};
  for (int j = 0; j < reference.k(); ++j) {
    double overlap = 0.0;
    for (int i = 0; i < target.k(); ++i) {
      const double de = Ciede2000(target.centroids[i], reference.centroids[j]);
      overlap +=
          target.weights[i] * std::max(0.0, 1.0 - de / kSharedColorOverlap);
    }
    const double score = reference.weights[j] * overlap;
    const bool better =
        score > best.score ||
        (score == best.score &&
         reference.weights[j] > reference.weights[best.index]);
    if (better) best = {j, reference.centroids[j], score};
  }
  return best;
}

BoostMap ComputeBoostMap(const QuantizedRegion& target, const LabColor& shared,
                         const PaletteDistances& distances,
                         const EnhancementParams& params) {
  const int width = target.raster.width();
  const int height = target.raster.height();
  BoostMap map{width, height,
               std::vector<double>(static_cast<std::size_t>(width) * height)};
  const double global =
      std::min(distances.delta_e_total / params.boost_global_scale, 1.0);
  std::unordered_map<std::uint32_t, double> cache;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!target.mask.at(x, y)) continue;
      const Rgb8 c = target.raster.at(x, y);
      const std::uint32_t key = (c.r << 16) | (c.g << 8) | c.b;
      auto it = cache.find(key);
      if (it == cache.end()) {
        const double de = Ciede2000(Rgb8ToLab(c), shared);
        const double similarity =
            std::max(0.0, 1.0 - de / params.boost_saturation_distance);
        it = cache.emplace(key, Clamp01(similarity * global)).first;
      }
      map.at(x, y) = it->second;
    }
  }
  return map;
}

double ScaleLightness(double lightness, double boost, double max_luminance,
                      double alpha) {
  return lightness * (1.0 + boost * (max_luminance - 1.0) * (1.0 - alpha));
}

double ScaleSaturation(double saturation, double boost, double max_sat_boost,
                       double alpha) {
  return saturation * (1.0 + boost * (max_sat_boost - 1.0) * alpha);
}

AbPoint PushChroma(AbPoint ab, double boost, double ab_push, AbPoint center) {
  const double da = ab.a - center.a;
  const double db = ab.b - center.b;
  const double norm = std::hypot(da, db);
  if (norm < 1e-6) return ab;
  const double step = boost * ab_push / norm;
  return {ab.a + step * da, ab.b + step * db};
}

AbPoint PaletteMeanAb(const Palette& palette) {
  const LabColor mean = PaletteMeanLab(palette);
  return {mean.a, mean.b};
}

RasterRegion Enhance(const QuantizedRegion& target, const BoostMap& boost,
                     const PaletteDistances& distances, AbPoint reference_mean_ab,
                     const EnhancementParams& params) {
  const int width = target.raster.width();
  const int height = target.raster.height();
  if (boost.width != width || boost.height != height ||
      boost.values.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kDimensionMismatch,
                "boost map does not match target dimensions");
  }
  const double alpha = distances.alpha;
  const std::size_t n = static_cast<std::size_t>(width) * height;

  std::vector<LabColor> original(n);
  std::vector<double> lightness(n, 0.0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!target.mask.at(x, y)) continue;
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      original[i] = Rgb8ToLab(target.raster.at(x, y));
      const double scaled = ScaleLightness(original[i].L, boost.values[i],
                                           params.max_luminance, alpha);
      lightness[i] = std::clamp(scaled, 0.0, 100.0);
    }
  }

  if (params.gamma != 1.0) {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (!target.mask.at(x, y)) continue;
        double& l = lightness[static_cast<std::size_t>(y) * width + x];
        l = 100.0 * std::pow(l / 100.0, params.gamma);
      }
    }
  }
  ApplyClahe(lightness, target.mask, {params.clahe_clip, params.clahe_tiles});

  RasterRegion out{target.raster, target.mask};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!target.mask.at(x, y)) continue;
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double b = boost.values[i];
      const AbPoint ab = PushChroma({original[i].a, original[i].b}, b,
                                    params.ab_push, reference_mean_ab);
      const LabColor lab{lightness[i], ab.a, ab.b};
      const double sat_gain = ScaleSaturation(1.0, b, params.max_sat_boost, alpha);
      if (lab == original[i] && sat_gain == 1.0) continue;

      RgbColor rgb = LabToRgb(lab);
      if (sat_gain != 1.0) {
        HsvColor hsv = RgbToHsv(rgb);
        hsv.s = Clamp01(hsv.s * sat_gain);
        rgb = HsvToRgb(hsv);
      }
      out.raster.set(x, y, ToRgb8(rgb));
    }
  }
  return out;
}

SkipDecision ShouldSkip(const QuantizedRegion& target,
                        const QuantizedRegion& reference,
                        const PaletteDistances& /*distances*/,
                        const EnhancementParams& params) {
  SkipDecision d;
  d.target_mean_l = WeightedMeanL(target.palette);
  d.reference_mean_l = WeightedMeanL(reference.palette);

  const SharedColor shared =
      FindSharedDominantColor(target.palette, reference.palette);
  double nearest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < target.palette.k(); ++i) {
    if (target.palette.weights[i] <= 0.0) continue;
    nearest = std::min(nearest, Ciede2000(target.palette.centroids[i],
                                          shared.color));
  }
  d.shared_delta_e = nearest;

  if (d.target_mean_l < d.reference_mean_l) {
    d.skip = true;
    d.reason = SkipReason::kDarkerTarget;
  } else if (nearest < params.skip_delta_e) {
    d.skip = true;
    d.reason = SkipReason::kBelowThreshold;
  }
  return d;
}

ProxyResult GenerateProxy(const RasterRegion& target,
                          const RasterRegion& reference,
                          const EnhancementParams& params, std::uint64_t seed,
                          int k) {
  const auto start = std::chrono::steady_clock::now();
  QuantizeOptions options;
  options.k = k;
  options.seed = seed;
  QuantizedRegion qt = Quantize(target, options);
  QuantizedRegion qr = Quantize(reference, options);
  const double quantize_ms = MillisSince(start);
  ProxyResult result = GenerateProxy(std::move(qt), qr, params);
  result.timings.quantize_ms = quantize_ms;
  return result;
}

ProxyResult GenerateProxy(QuantizedRegion target,
                          const QuantizedRegion& reference,
                          const EnhancementParams& params) {
  params.Validate();
  ProxyResult result;
  auto start = std::chrono::steady_clock::now();
  result.target_palette = target.palette;
  result.reference_palette = reference.palette;
  result.distances =
      ComputePaletteDistances(target.palette, reference.palette);
  result.shared = FindSharedDominantColor(target.palette, reference.palette);
  result.decision = ShouldSkip(target, reference, result.distances, params);
  result.timings.analyze_ms = MillisSince(start);

  start = std::chrono::steady_clock::now();
  if (result.decision.skip) {
    result.proxy = target.region();
  } else {
    const BoostMap boost = ComputeBoostMap(target, result.shared.color,
                                           result.distances, params);
    result.proxy = Enhance(target, boost, result.distances,
                           PaletteMeanAb(reference.palette), params);
  }
  result.timings.enhance_ms = MillisSince(start);
  result.quantized_target = std::move(target);
  return result;
}

ProxyResult QuantizeOnlyProxy(QuantizedRegion target, SkipReason reason) {
  ProxyResult result;
  result.proxy = target.region();
  result.target_palette = target.palette;
  result.decision.skip = true;
  result.decision.reason = reason;
  result.decision.target_mean_l = PaletteMeanLab(target.palette).L;
  result.quantized_target = std::move(target);
  return result;
}

}  // namespace proxykit
