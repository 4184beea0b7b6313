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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace proxykit {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

// Axis-aligned pixel rectangle, half-open: [x, x + w) x [y, y + h).
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const { return w <= 0 || h <= 0; }
  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  Rect intersect(const Rect& other) const;
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Interleaved 8-bit RGB raster, row-major.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Rgb8 fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  Rgb8 at(int x, int y) const {
    const auto* p = &data_[Offset(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb8 c) {
    auto* p = &data_[Offset(x, y)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  std::span<const std::uint8_t> bytes() const { return data_; }
  std::span<std::uint8_t> bytes() { return data_; }

  Raster crop(const Rect& rect) const;
  void fill_rect(const Rect& rect, Rgb8 c);

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t Offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Binary mask; nonzero bytes are "selected".
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool value = false);

  int width() const { return width_; }
  int height() const { return height_; }

  bool at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v) {
    data_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
  }

  std::size_t count() const;
  // Tight bounding box of selected pixels; empty rect when nothing is set.
  Rect bounds() const;
  Mask crop(const Rect& rect) const;
  void fill_rect(const Rect& rect, bool v);

  std::span<const std::uint8_t> bytes() const { return data_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// An RGB raster plus the mask selecting the object's pixels.
struct RasterRegion {
  Raster raster;
  Mask mask;

  RasterRegion() = default;
  RasterRegion(Raster r, Mask m);
  // Whole raster selected.
  explicit RasterRegion(Raster r);

  int width() const { return raster.width(); }
  int height() const { return raster.height(); }

  friend bool operator==(const RasterRegion&, const RasterRegion&) = default;
};

struct DecodedImage {
  Raster raster;
  std::optional<Mask> alpha;  // present when the PNG carried an alpha channel
};

// PNG codec. Encoding is deterministic: identical rasters give identical bytes.
std::vector<std::uint8_t> EncodePng(const Raster& raster,
                                    const Mask* alpha = nullptr);
DecodedImage DecodePng(std::span<const std::uint8_t> bytes);

DecodedImage ReadPng(const std::filesystem::path& path);
void WritePng(const std::filesystem::path& path, const Raster& raster,
              const Mask* alpha = nullptr);

// Reads a mask image: pixels with luma > 127 are selected. A fully
// transparent pixel is never selected.
Mask ReadMaskPng(const std::filesystem::path& path);
Mask MaskFromRaster(const Raster& raster);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes);

}  // namespace proxykit
