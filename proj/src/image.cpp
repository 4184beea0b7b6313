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

#include "proxykit/image.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "proxykit/error.hpp"

namespace proxykit {

Rect Rect::intersect(const Rect& other) const {
  const int x0 = std::max(x, other.x);
  const int y0 = std::max(y, other.y);
  const int x1 = std::min(x + w, other.x + other.w);
  const int y1 = std::min(y + h, other.y + other.h);
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

Raster::Raster(int width, int height, Rgb8 fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative raster dimensions");
  }
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Raster Raster::crop(const Rect& rect) const {
  const Rect r = rect.intersect({0, 0, width_, height_});
  Raster out(std::max(r.w, 0), std::max(r.h, 0));
  for (int y = 0; y < out.height(); ++y) {
    const auto* src = &data_[Offset(r.x, r.y + y)];
    std::memcpy(&out.data_[out.Offset(0, y)], src,
                static_cast<std::size_t>(out.width()) * 3);
  }
  return out;
}

void Raster::fill_rect(const Rect& rect, Rgb8 c) {
  const Rect r = rect.intersect({0, 0, width_, height_});
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x) set(x, y, c);
}

Mask::Mask(int width, int height, bool value)
    : width_(width),
      height_(height),
      data_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0),
            value ? 1 : 0) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative mask dimensions");
  }
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [](auto v) { return v != 0; }));
}

Rect Mask::bounds() const {
  int x0 = width_, y0 = height_, x1 = -1, y1 = -1;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

Mask Mask::crop(const Rect& rect) const {
  const Rect r = rect.intersect({0, 0, width_, height_});
  Mask out(std::max(r.w, 0), std::max(r.h, 0));
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out.set(x, y, at(r.x + x, r.y + y));
  return out;
}

void Mask::fill_rect(const Rect& rect, bool v) {
  const Rect r = rect.intersect({0, 0, width_, height_});
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x) set(x, y, v);
}

RasterRegion::RasterRegion(Raster r, Mask m)
    : raster(std::move(r)), mask(std::move(m)) {
  if (raster.width() != mask.width() || raster.height() != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask dimensions do not match raster");
  }
}

RasterRegion::RasterRegion(Raster r)
    : raster(std::move(r)), mask(raster.width(), raster.height(), true) {}

namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

// libpng reports failures via longjmp; the message is stashed here so the
// C++ caller can throw once control is back outside the jump scope.
struct PngErrorSink {
  char message[256] = {};
};

void ReadCallback(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->pos + length > cursor->bytes.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, cursor->bytes.data() + cursor->pos, length);
  cursor->pos += length;
}

void WriteCallback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void FlushCallback(png_structp) {}

void ErrorCallback(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  png_longjmp(png, 1);
}

void WarningCallback(png_structp, png_const_charp) {}

struct EncodeJob {
  const std::uint8_t* rows;  // interleaved, `channels` per pixel
  int width;
  int height;
  int channels;
  std::vector<std::uint8_t>* out;
};

bool RunEncode(png_structp png, png_infop info, const EncodeJob& job) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, job.out, WriteCallback, FlushCallback);
  png_set_IHDR(png, info, job.width, job.height, 8,
               job.channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(job.width) * job.channels;
  for (int y = 0; y < job.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(job.rows + stride * y));
  }
  png_write_end(png, nullptr);
  return true;
}

struct DecodeHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  bool has_alpha = false;
};

bool RunReadHeader(png_structp png, png_infop info, ReadCursor* cursor,
                   DecodeHeader* header) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_read_fn(png, cursor, ReadCallback);
  png_read_info(png, info);
  header->width = png_get_image_width(png, info);
  header->height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  header->has_alpha = (color_type & PNG_COLOR_MASK_ALPHA) != 0 ||
                      png_get_valid(png, info, PNG_INFO_tRNS);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (!header->has_alpha) png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  return true;
}

bool RunReadPixels(png_structp png, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

constexpr png_uint_32 kMaxDimension = 1u << 15;

}  // namespace

std::vector<std::uint8_t> EncodePng(const Raster& raster, const Mask* alpha) {
  if (raster.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot encode an empty raster");
  }
  if (alpha && (alpha->width() != raster.width() ||
                alpha->height() != raster.height())) {
    throw Error(ErrorCode::kDimensionMismatch, "alpha mask size mismatch");
  }
  const int channels = alpha ? 4 : 3;
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(raster.width()) *
                                   raster.height() * channels);
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      const Rgb8 c = raster.at(x, y);
      auto* p =
          &pixels[(static_cast<std::size_t>(y) * raster.width() + x) * channels];
      p[0] = c.r;
      p[1] = c.g;
      p[2] = c.b;
      if (alpha) p[3] = alpha->at(x, y) ? 255 : 0;
    }
  }

  PngErrorSink sink;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink,
                                            ErrorCallback, WarningCallback);
  if (!png) throw Error(ErrorCode::kIo, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<std::uint8_t> out;
  const bool ok = info && RunEncode(png, info,
                                    {pixels.data(), raster.width(),
                                     raster.height(), channels, &out});
  png_destroy_write_struct(&png, &info);
  if (!ok) throw Error(ErrorCode::kIo, std::string("png: ") + sink.message);
  return out;
}

DecodedImage DecodePng(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::kParse, "not a PNG stream");
  }
  PngErrorSink sink;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink,
                                           ErrorCallback, WarningCallback);
  if (!png) throw Error(ErrorCode::kIo, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{bytes, 0};
  DecodeHeader header;
  bool ok = info && RunReadHeader(png, info, &cursor, &header);
  if (ok && (header.width == 0 || header.height == 0 ||
             header.width > kMaxDimension || header.height > kMaxDimension)) {
    std::snprintf(sink.message, sizeof(sink.message), "unsupported size");
    ok = false;
  }
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  if (ok) {
    pixels.resize(static_cast<std::size_t>(header.width) * header.height * 4);
    rows.resize(header.height);
    for (png_uint_32 y = 0; y < header.height; ++y)
      rows[y] = &pixels[static_cast<std::size_t>(y) * header.width * 4];
    ok = RunReadPixels(png, rows.data());
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) throw Error(ErrorCode::kParse, std::string("png: ") + sink.message);

  const int width = static_cast<int>(header.width);
  const int height = static_cast<int>(header.height);
  DecodedImage result;
  result.raster = Raster(width, height);
  if (header.has_alpha) result.alpha = Mask(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 4];
      result.raster.set(x, y, {p[0], p[1], p[2]});
      if (header.has_alpha) result.alpha->set(x, y, p[3] > 127);
    }
  }
  return result;
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

DecodedImage ReadPng(const std::filesystem::path& path) {
  return DecodePng(ReadFileBytes(path));
}

void WritePng(const std::filesystem::path& path, const Raster& raster,
              const Mask* alpha) {
  WriteFileBytes(path, EncodePng(raster, alpha));
}

Mask MaskFromRaster(const Raster& raster) {
  Mask mask(raster.width(), raster.height());
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      const Rgb8 c = raster.at(x, y);
      mask.set(x, y, (c.r * 299 + c.g * 587 + c.b * 114) > 127 * 1000);
    }
  }
  return mask;
}

Mask ReadMaskPng(const std::filesystem::path& path) {
  DecodedImage img = ReadPng(path);
  Mask mask = MaskFromRaster(img.raster);
  if (img.alpha) {
    for (int y = 0; y < mask.height(); ++y)
      for (int x = 0; x < mask.width(); ++x)
        if (!img.alpha->at(x, y)) mask.set(x, y, false);
  }
  return mask;
}

std::string_view ErrorName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNoNeighbors: return "NoNeighbors";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kNoDotFound: return "NoDotFound";
    case ErrorCode::kNoTarget: return "NoTarget";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kSessionComplete: return "SessionComplete";
    case ErrorCode::kInvalidChoice: return "InvalidChoice";
    case ErrorCode::kOutOfOrder: return "OutOfOrder";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

}  // namespace proxykit
