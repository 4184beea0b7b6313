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
#include <vector>

#include "proxykit/colorspace.hpp"
#include "proxykit/image.hpp"

namespace proxykit {

inline constexpr int kDefaultClusters = 7;
inline constexpr std::uint64_t kDefaultSeed = 42;

// K weighted Lab centroids. Empty clusters keep a slot with weight 0.
struct Palette {
  std::vector<LabColor> centroids;
  std::vector<double> weights;

  int k() const { return static_cast<int>(centroids.size()); }
};

struct QuantizedRegion {
  Raster raster;  // masked pixels replaced by their centroid color
  Mask mask;
  Palette palette;
  // Cluster index per pixel, row-major; -1 for unmasked pixels.
  std::vector<int> assignment;

  RasterRegion region() const { return {raster, mask}; }
};

struct QuantizeOptions {
  int k = kDefaultClusters;
  std::uint64_t seed = kDefaultSeed;
  int batch_size = 1024;
  int max_iterations = 100;
  int n_init = 3;  // independent seedings; lowest inertia wins
  double tolerance = 1e-3;  // max centroid shift (Lab units) to stop
  bool clear_unmasked = false;  // zero out pixels outside the mask
};

// Mini-batch k-means over the masked pixels in Lab space (Euclidean).
// Deterministic for a fixed seed. Throws Error(kEmptyMask).
QuantizedRegion Quantize(const RasterRegion& region,
                         const QuantizeOptions& options = {});

// Weight-averaged Lab coordinates of the palette.
LabColor PaletteMeanLab(const Palette& palette);

// Mean Euclidean Lab distance from each masked source pixel to its centroid.
double ReconstructionError(const RasterRegion& source,
                           const QuantizedRegion& quantized);

// Throws Error(kInvalidArgument) if the palette breaks its invariants.
void ValidatePalette(const Palette& palette);

}  // namespace proxykit
