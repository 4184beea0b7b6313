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

#include "proxykit/quantizer.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>

#include "proxykit/error.hpp"

namespace proxykit {
namespace {

double SquaredDistance(const LabColor& x, const LabColor& y) {
  const double dl = x.L - y.L;
  const double da = x.a - y.a;
  const double db = x.b - y.b;
  return dl * dl + da * da + db * db;
}

// Uniform double in [0, 1) from the top 53 bits; portable across stdlibs.
double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t UniformIndex(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(UniformUnit(rng) * static_cast<double>(n));
}

class Clusters {
 public:
  explicit Clusters(int k) : centers_(k), active_(k, false), counts_(k, 0) {}

  int Nearest(const LabColor& p) const {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < static_cast<int>(centers_.size()); ++c) {
      if (!active_[c]) continue;
      const double d = SquaredDistance(p, centers_[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    return best;
  }

  double NearestDistance(const LabColor& p) const {
    const int c = Nearest(p);
    return c < 0 ? std::numeric_limits<double>::infinity()
                 : SquaredDistance(p, centers_[c]);
  }

  // k-means++ seeding over all points. Stops early when every remaining
  // point coincides with a chosen center.
  void Seed(const std::vector<LabColor>& points, std::mt19937_64& rng) {
    const std::size_t n = points.size();
    std::vector<double> d2(n);
    centers_[0] = points[UniformIndex(rng, n)];
    active_[0] = true;
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = SquaredDistance(points[i], centers_[0]);
    for (std::size_t c = 1; c < centers_.size(); ++c) {
      double total = 0.0;
      for (double v : d2) total += v;
      if (total <= 0.0) break;
      double target = UniformUnit(rng) * total;
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        pick = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
      centers_[c] = points[pick];
      active_[c] = true;
      for (std::size_t i = 0; i < n; ++i)
        d2[i] = std::min(d2[i], SquaredDistance(points[i], centers_[c]));
    }
  }

  // One mini-batch step; returns the largest centroid displacement.
  double Step(const std::vector<LabColor>& points,
              const std::vector<std::size_t>& batch) {
    const std::vector<LabColor> before = centers_;
    std::vector<int> labels(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
      labels[i] = Nearest(points[batch[i]]);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const int c = labels[i];
      const LabColor& x = points[batch[i]];
      const double eta = 1.0 / static_cast<double>(++counts_[c]);
      centers_[c].L += eta * (x.L - centers_[c].L);
      centers_[c].a += eta * (x.a - centers_[c].a);
      centers_[c].b += eta * (x.b - centers_[c].b);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < centers_.size(); ++c) {
      if (active_[c])
        shift = std::max(shift, std::sqrt(SquaredDistance(before[c],
                                                          centers_[c])));
    }
    return shift;
  }

  const std::vector<LabColor>& centers() const { return centers_; }
  bool active(int c) const { return active_[c]; }

 private:
  std::vector<LabColor> centers_;
  std::vector<bool> active_;
  std::vector<long long> counts_;
};

}  // namespace

void ValidatePalette(const Palette& palette) {
  if (palette.centroids.empty() ||
      palette.centroids.size() != palette.weights.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "palette needs matching non-empty centroids and weights");
  }
  double sum = 0.0;
  for (double w : palette.weights) {
    if (!(w >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "negative palette weight");
    }
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "palette weights sum to " + std::to_string(sum));
  }
}

QuantizedRegion Quantize(const RasterRegion& region,
                         const QuantizeOptions& options) {
  if (options.k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  }
  const int width = region.width();
  const int height = region.height();

  std::unordered_map<std::uint32_t, LabColor> lab_cache;
  std::vector<LabColor> points;
  std::vector<std::size_t> pixel_of_point;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!region.mask.at(x, y)) continue;
      const Rgb8 c = region.raster.at(x, y);
      const std::uint32_t key = (c.r << 16) | (c.g << 8) | c.b;
      auto it = lab_cache.find(key);
      if (it == lab_cache.end()) it = lab_cache.emplace(key, Rgb8ToLab(c)).first;
      points.push_back(it->second);
      pixel_of_point.push_back(static_cast<std::size_t>(y) * width + x);
    }
  }
  if (points.empty()) {
    throw Error(ErrorCode::kEmptyMask, "mask selects no pixels");
  }

  // Several independent initializations; keep the lowest inertia.
  std::mt19937_64 rng(options.seed);
  const std::size_t n = points.size();
  const std::size_t batch_size =
      std::min<std::size_t>(n, std::max(options.batch_size, 1));
  std::vector<std::size_t> batch(batch_size);
  std::optional<Clusters> best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int init = 0; init < std::max(options.n_init, 1); ++init) {
    Clusters clusters(options.k);
    clusters.Seed(points, rng);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
      if (batch_size == n) {
        for (std::size_t i = 0; i < n; ++i) batch[i] = i;
      } else {
        for (auto& idx : batch) idx = UniformIndex(rng, n);
      }
      if (clusters.Step(points, batch) < options.tolerance) break;
    }
    double inertia = 0.0;
    for (const auto& p : points) inertia += clusters.NearestDistance(p);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(clusters);
    }
  }
  const Clusters& clusters = *best;

  QuantizedRegion out;
  out.mask = region.mask;
  out.raster = region.raster;
  if (options.clear_unmasked) {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x)
        if (!region.mask.at(x, y)) out.raster.set(x, y, {});
  }
  out.assignment.assign(static_cast<std::size_t>(width) * height, -1);

  std::vector<std::size_t> counts(options.k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = clusters.Nearest(points[i]);
    out.assignment[pixel_of_point[i]] = c;
    ++counts[c];
  }

  const auto& centers = clusters.centers();
  out.palette.centroids.resize(options.k);
  out.palette.weights.resize(options.k);
  std::vector<Rgb8> center_rgb(options.k);
  for (int c = 0; c < options.k; ++c) {
    out.palette.centroids[c] = clusters.active(c) ? centers[c] : centers[0];
    out.palette.weights[c] =
        static_cast<double>(counts[c]) / static_cast<double>(n);
    center_rgb[c] = LabToRgb8(out.palette.centroids[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = pixel_of_point[i];
    out.raster.set(static_cast<int>(p % width), static_cast<int>(p / width),
                   center_rgb[out.assignment[p]]);
  }
  return out;
}

LabColor PaletteMeanLab(const Palette& palette) {
  LabColor mean{};
  for (std::size_t i = 0; i < palette.centroids.size(); ++i) {
    const double w = palette.weights[i];
    mean.L += w * palette.centroids[i].L;
    mean.a += w * palette.centroids[i].a;
    mean.b += w * palette.centroids[i].b;
  }
  return mean;
}

double ReconstructionError(const RasterRegion& source,
                           const QuantizedRegion& quantized) {
  double total = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < source.height(); ++y) {
    for (int x = 0; x < source.width(); ++x) {
      const int c =
          quantized.assignment[static_cast<std::size_t>(y) * source.width() + x];
      if (c < 0) continue;
      total += std::sqrt(SquaredDistance(Rgb8ToLab(source.raster.at(x, y)),
                                         quantized.palette.centroids[c]));
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

}  // namespace proxykit
