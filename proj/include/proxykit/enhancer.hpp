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
#include <string_view>
#include <vector>

#include "proxykit/colorspace.hpp"
#include "proxykit/image.hpp"
#include "proxykit/quantizer.hpp"

namespace proxykit {

// Coverage-weighted palette-to-palette distances. alpha is the share of
// chroma difference in the combined lightness + chroma difference.
struct PaletteDistances {
  double delta_e_total = 0.0;
  double delta_l = 0.0;
  double delta_c = 0.0;
  double alpha = 0.5;
};

struct EnhancementParams {
  double max_luminance = 2.125;  // [1, 8]
  double max_sat_boost = 9.75;   // [1, 16]
  double ab_push = 30.0;         // [0, 60]
  double skip_delta_e = 5.0;
  double gamma = 0.9;       // 1 disables
  double clahe_clip = 2.0;  // 0 disables
  int clahe_tiles = 8;
  double boost_saturation_distance = 50.0;
  double boost_global_scale = 30.0;

  // Identity settings for the three tuned parameters, gamma/CLAHE off.
  static EnhancementParams Identity();
  // Throws Error(kInvalidArgument) on out-of-range values.
  void Validate() const;

  friend bool operator==(const EnhancementParams&,
                         const EnhancementParams&) = default;
};

// Per-pixel enhancement gain in [0, 1]; zero outside the target mask.
struct BoostMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  double& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

struct SharedColor {
  int index = 0;  // reference palette slot
  LabColor color;
  double score = 0.0;
};

enum class SkipReason {
  kNone,
  kDarkerTarget,
  kBelowThreshold,
  kNoNeighbors,
  kNoReference,
};

std::string_view SkipReasonName(SkipReason reason);

struct SkipDecision {
  bool skip = false;
  SkipReason reason = SkipReason::kNone;
  // Weighted mean lightness of target and reference palettes.
  double target_mean_l = 0.0;
  double reference_mean_l = 0.0;
  // CIEDE2000 between the shared color and its nearest target centroid.
  double shared_delta_e = 0.0;
};

struct AbPoint {
  double a = 0.0;
  double b = 0.0;
};

PaletteDistances ComputePaletteDistances(const Palette& target,
                                         const Palette& reference);

// Overlap scale for the shared-color score, in CIEDE2000 units.
inline constexpr double kSharedColorOverlap = 25.0;

// Reference centroid maximizing
//   h_R(j) * sum_i h_T(i) * max(0, 1 - dE00(c_i, c_j) / 25);
// ties go to the heavier reference cluster, then the lower index.
SharedColor FindSharedDominantColor(const Palette& target,
                                    const Palette& reference);

BoostMap ComputeBoostMap(const QuantizedRegion& target, const LabColor& shared,
                         const PaletteDistances& distances,
                         const EnhancementParams& params);

// Single-pixel channel formulas.
double ScaleLightness(double lightness, double boost, double max_luminance,
                      double alpha);
double ScaleSaturation(double saturation, double boost, double max_sat_boost,
                       double alpha);
// Pushes (a, b) away from `center` by boost * ab_push. Points within 1e-6
// of the center are returned unchanged.
AbPoint PushChroma(AbPoint ab, double boost, double ab_push, AbPoint center);

// Palette-weighted mean (a, b).
AbPoint PaletteMeanAb(const Palette& palette);

// Applies lightness scaling, gamma, CLAHE on L, chroma push and saturation
// boost, in that order. Pixels left untouched by every stage keep their
// original bytes. Throws Error(kDimensionMismatch).
RasterRegion Enhance(const QuantizedRegion& target, const BoostMap& boost,
                     const PaletteDistances& distances, AbPoint reference_mean_ab,
                     const EnhancementParams& params);

SkipDecision ShouldSkip(const QuantizedRegion& target,
                        const QuantizedRegion& reference,
                        const PaletteDistances& distances,
                        const EnhancementParams& params);

struct ProxyTimings {
  double quantize_ms = 0.0;
  double analyze_ms = 0.0;
  double enhance_ms = 0.0;
};

struct ProxyResult {
  RasterRegion proxy;
  QuantizedRegion quantized_target;
  Palette target_palette;
  Palette reference_palette;
  PaletteDistances distances;
  SharedColor shared;
  SkipDecision decision;
  ProxyTimings timings;

  bool skipped() const { return decision.skip; }
};

// Quantize both regions, analyze, and enhance unless a skip rule fires.
// Throws Error(kEmptyMask) if either mask is empty.
ProxyResult GenerateProxy(const RasterRegion& target,
                          const RasterRegion& reference,
                          const EnhancementParams& params,
                          std::uint64_t seed = kDefaultSeed,
                          int k = kDefaultClusters);

// Same pipeline from already quantized regions.
ProxyResult GenerateProxy(QuantizedRegion target,
                          const QuantizedRegion& reference,
                          const EnhancementParams& params);

// A quantization-only result, used when no reference is available.
ProxyResult QuantizeOnlyProxy(QuantizedRegion target, SkipReason reason);

}  // namespace proxykit
