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

#include "proxykit/clahe.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace proxykit {
namespace {

constexpr int kBins = 256;
using Lut = std::array<double, kBins>;

int BinOf(double lightness) {
  return static_cast<int>(
      std::clamp(std::lround(lightness / 100.0 * (kBins - 1)), 0L,
                 static_cast<long>(kBins - 1)));
}

Lut IdentityLut() {
  Lut lut{};
  for (int i = 0; i < kBins; ++i) lut[i] = i;
  return lut;
}

Lut BuildLut(std::array<long, kBins> hist, long total, double clip_limit) {
  if (total == 0) return IdentityLut();
  const long limit = std::max(
      1L, static_cast<long>(clip_limit * static_cast<double>(total) / kBins));
  long excess = 0;
  for (auto& h : hist) {
    if (h > limit) {
      excess += h - limit;
      h = limit;
    }
  }
  const long per_bin = excess / kBins;
  const long residual = excess - per_bin * kBins;
  for (auto& h : hist) h += per_bin;
  if (residual > 0) {
    const int step = std::max(kBins / static_cast<int>(residual), 1);
    long left = residual;
    for (int i = 0; i < kBins && left > 0; i += step, --left) ++hist[i];
  }
  Lut lut{};
  long cdf = 0;
  const double scale = static_cast<double>(kBins - 1) / static_cast<double>(total);
  for (int i = 0; i < kBins; ++i) {
    cdf += hist[i];
    lut[i] = std::min(static_cast<double>(kBins - 1), cdf * scale);
  }
  return lut;
}

}  // namespace

void ApplyClahe(std::vector<double>& lightness, const Mask& mask,
                const ClaheOptions& options) {
  if (options.clip_limit <= 0.0 || options.tiles < 1) return;
  const Rect box = mask.bounds();
  if (box.empty()) return;
  const int width = mask.width();
  const int tiles_x = std::min(options.tiles, box.w);
  const int tiles_y = std::min(options.tiles, box.h);

  auto tile_x0 = [&](int t) { return box.x + t * box.w / tiles_x; };
  auto tile_y0 = [&](int t) { return box.y + t * box.h / tiles_y; };

  std::vector<Lut> luts(static_cast<std::size_t>(tiles_x) * tiles_y);
  for (int ty = 0; ty < tiles_y; ++ty) {
    for (int tx = 0; tx < tiles_x; ++tx) {
      std::array<long, kBins> hist{};
      long total = 0;
      for (int y = tile_y0(ty); y < tile_y0(ty + 1); ++y) {
        for (int x = tile_x0(tx); x < tile_x0(tx + 1); ++x) {
          if (!mask.at(x, y)) continue;
          ++hist[BinOf(lightness[static_cast<std::size_t>(y) * width + x])];
          ++total;
        }
      }
      luts[static_cast<std::size_t>(ty) * tiles_x + tx] =
          BuildLut(hist, total, options.clip_limit);
    }
  }

  const double tile_w = static_cast<double>(box.w) / tiles_x;
  const double tile_h = static_cast<double>(box.h) / tiles_y;
  std::vector<double> out = lightness;
  for (int y = box.y; y < box.y + box.h; ++y) {
    const double fy = (y - box.y + 0.5) / tile_h - 0.5;
    const int ty1 = static_cast<int>(std::floor(fy));
    const double wy = fy - ty1;
    const int ty_lo = std::clamp(ty1, 0, tiles_y - 1);
    const int ty_hi = std::clamp(ty1 + 1, 0, tiles_y - 1);
    for (int x = box.x; x < box.x + box.w; ++x) {
      if (!mask.at(x, y)) continue;
      const double fx = (x - box.x + 0.5) / tile_w - 0.5;
      const int tx1 = static_cast<int>(std::floor(fx));
      const double wx = fx - tx1;
      const int tx_lo = std::clamp(tx1, 0, tiles_x - 1);
      const int tx_hi = std::clamp(tx1 + 1, 0, tiles_x - 1);
      const std::size_t idx = static_cast<std::size_t>(y) * width + x;
      const int bin = BinOf(lightness[idx]);
      auto lut = [&](int tx, int ty) {
        return luts[static_cast<std::size_t>(ty) * tiles_x + tx][bin];
      };
      const double top = (1.0 - wx) * lut(tx_lo, ty_lo) + wx * lut(tx_hi, ty_lo);
      const double bottom =
          (1.0 - wx) * lut(tx_lo, ty_hi) + wx * lut(tx_hi, ty_hi);
      const double v = (1.0 - wy) * top + wy * bottom;
      out[idx] = v * 100.0 / (kBins - 1);
    }
  }
  lightness = std::move(out);
}

}  // namespace proxykit
