// Copyright 2026 The pfkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pfkit/corpus/region_marker.h"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>

#include "pfkit/errors.h"
#include "pfkit/json_io.h"

namespace pfkit {
namespace {

constexpr std::array<uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G',
                                                  '\r', '\n', 0x1a, '\n'};

std::array<uint8_t, 3> ColorValue(MarkerColor color) {
  switch (color) {
    case MarkerColor::kGreen:
      return {0, 255, 0};
    case MarkerColor::kRed:
      return {255, 0, 0};
    case MarkerColor::kBlue:
      return {0, 0, 255};
  }
  return {0, 255, 0};
}

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
};

Raster DecodePng(std::span<const uint8_t> bytes) {
  PngImage png;
  if (png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size()) == 0) {
    throw DecodeError(std::string("png: ") + png.image.message);
  }
  png.image.format = PNG_FORMAT_RGB;
  if (png.image.width == 0 || png.image.height == 0 ||
      png.image.width > 1u << 15 || png.image.height > 1u << 15) {
    throw DecodeError("png: unsupported dimensions");
  }
  Raster raster(static_cast<int>(png.image.width), static_cast<int>(png.image.height));
  if (png_image_finish_read(&png.image, nullptr, raster.rgb.data(), 0, nullptr) == 0) {
    throw DecodeError(std::string("png: ") + png.image.message);
  }
  return raster;
}

std::vector<uint8_t> EncodePng(const Raster& raster) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(raster.width);
  png.image.height = static_cast<png_uint_32>(raster.height);
  png.image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&png.image, nullptr, &size, 0, raster.rgb.data(), 0,
                                nullptr) == 0) {
    throw DecodeError(std::string("png encode: ") + png.image.message);
  }
  std::vector<uint8_t> out(size);
  if (png_image_write_to_memory(&png.image, out.data(), &size, 0, raster.rgb.data(),
                                0, nullptr) == 0) {
    throw DecodeError(std::string("png encode: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

// Reads one whitespace-delimited header token of a PPM, skipping comments.
std::string PpmToken(std::span<const uint8_t> bytes, size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    token.push_back(static_cast<char>(bytes[pos++]));
  }
  return token;
}

int PpmInt(std::span<const uint8_t> bytes, size_t& pos) {
  std::string token = PpmToken(bytes, pos);
  if (token.empty() || token.size() > 6 ||
      !std::all_of(token.begin(), token.end(), ::isdigit)) {
    throw DecodeError("ppm: bad header");
  }
  return std::stoi(token);
}

Raster DecodePpm(std::span<const uint8_t> bytes) {
  size_t pos = 0;
  if (PpmToken(bytes, pos) != "P6") throw DecodeError("ppm: not P6");
  const int width = PpmInt(bytes, pos);
  const int height = PpmInt(bytes, pos);
  const int maxval = PpmInt(bytes, pos);
  if (width <= 0 || height <= 0 || maxval != 255) {
    throw DecodeError("ppm: only 8-bit images with positive size are supported");
  }
  ++pos;  // single whitespace before the raster
  Raster raster(width, height);
  if (bytes.size() < pos + raster.rgb.size()) throw DecodeError("ppm: truncated");
  std::copy_n(bytes.begin() + pos, raster.rgb.size(), raster.rgb.begin());
  return raster;
}

std::vector<uint8_t> EncodePpm(const Raster& raster) {
  std::string header = "P6\n" + std::to_string(raster.width) + " " +
                       std::to_string(raster.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), raster.rgb.begin(), raster.rgb.end());
  return out;
}

void Plot(Raster& raster, int x, int y, const std::array<uint8_t, 3>& color) {
  if (x < 0 || y < 0 || x >= raster.width || y >= raster.height) return;
  uint8_t* p = raster.Pixel(x, y);
  p[0] = color[0];
  p[1] = color[1];
  p[2] = color[2];
}

int Round(double v) { return static_cast<int>(std::lround(v)); }

}  // namespace

Raster DecodeImage(std::span<const uint8_t> bytes, ImageFormat* format) {
  if (bytes.size() >= kPngSignature.size() &&
      std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
    if (format) *format = ImageFormat::kPng;
    return DecodePng(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    if (format) *format = ImageFormat::kPpm;
    return DecodePpm(bytes);
  }
  throw DecodeError("unrecognized image format");
}

std::vector<uint8_t> EncodeImage(const Raster& raster, ImageFormat format) {
  return format == ImageFormat::kPng ? EncodePng(raster) : EncodePpm(raster);
}

void DrawRegionMarker(Raster& raster, const RegionAnnotation& region) {
  if (std::string issue = CheckRegion(region, raster.width, raster.height);
      !issue.empty()) {
    throw OutOfBounds(issue);
  }
  const auto color = ColorValue(region.color);
  const auto& c = region.coords;
  switch (region.kind) {
    case RegionKind::kBox: {
      const int x1 = Round(c[0]);
      const int y1 = Round(c[1]);
      const int x2 = std::min(Round(c[2]), raster.width - 1);
      const int y2 = std::min(Round(c[3]), raster.height - 1);
      for (int y = y1; y <= y2; ++y) {
        for (int x = x1; x <= x2; ++x) {
          if (x - x1 < kMarkerStrokePx || x2 - x < kMarkerStrokePx ||
              y - y1 < kMarkerStrokePx || y2 - y < kMarkerStrokePx) {
            Plot(raster, x, y, color);
          }
        }
      }
      break;
    }
    case RegionKind::kCircle: {
      const double cx = c[0];
      const double cy = c[1];
      const double r = c[2];
      const double inner = std::max(0.0, r - kMarkerStrokePx);
      const int x0 = static_cast<int>(std::floor(cx - r));
      const int x1 = static_cast<int>(std::ceil(cx + r));
      const int y0 = static_cast<int>(std::floor(cy - r));
      const int y1 = static_cast<int>(std::ceil(cy + r));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
          if (d2 <= r * r && (inner == 0.0 || d2 > inner * inner)) {
            Plot(raster, x, y, color);
          }
        }
      }
      break;
    }
    case RegionKind::kArrow: {
      const int tx = Round(c[0]);
      const int ty = Round(c[1]);
      const int direction = ty + kArrowHeightPx < raster.height ? 1 : -1;
      for (int t = 0; t <= kArrowHeightPx; ++t) {
        const double half = kArrowHalfWidthPx * static_cast<double>(t) / kArrowHeightPx;
        const int lo = static_cast<int>(std::ceil(tx - half - 1e-9));
        const int hi = static_cast<int>(std::floor(tx + half + 1e-9));
        for (int x = lo; x <= hi; ++x) Plot(raster, x, ty + direction * t, color);
      }
      break;
    }
  }
}

std::vector<uint8_t> RenderRegionMarker(std::span<const uint8_t> image_bytes,
                                        const RegionAnnotation& region) {
  ImageFormat format = ImageFormat::kPng;
  Raster raster = DecodeImage(image_bytes, &format);
  DrawRegionMarker(raster, region);
  return EncodeImage(raster, format);
}

std::vector<uint8_t> RenderRegionMarker(const ImageRef& image,
                                        const RegionAnnotation& region) {
  std::string path = image.uri;
  if (path.rfind("file://", 0) == 0) path = path.substr(7);
  const std::string data = ReadFile(path);
  return RenderRegionMarker(
      std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(data.data()),
                               data.size()),
      region);
}

}  // namespace pfkit
