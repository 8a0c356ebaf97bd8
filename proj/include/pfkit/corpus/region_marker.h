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

#ifndef PFKIT_CORPUS_REGION_MARKER_H_
#define PFKIT_CORPUS_REGION_MARKER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "pfkit/corpus/sample.h"

namespace pfkit {

inline constexpr int kMarkerStrokePx = 4;
inline constexpr int kArrowHeightPx = 24;
inline constexpr int kArrowHalfWidthPx = 8;

enum class ImageFormat { kPng, kPpm };

// 8-bit RGB raster, row-major.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;

  Raster() = default;
  Raster(int w, int h) : width(w), height(h), rgb(size_t(w) * h * 3, 0) {}

  uint8_t* Pixel(int x, int y) { return &rgb[(size_t(y) * width + x) * 3]; }
  const uint8_t* Pixel(int x, int y) const {
    return &rgb[(size_t(y) * width + x) * 3];
  }
  bool operator==(const Raster&) const = default;
};

// PNG (any color type, converted to RGB8) or binary PPM. Throws DecodeError.
Raster DecodeImage(std::span<const uint8_t> bytes, ImageFormat* format = nullptr);
std::vector<uint8_t> EncodeImage(const Raster& raster, ImageFormat format);

// Draws the marker in place: boxes as a 4-px outline drawn inward from the
// box edge, circles as a 4-px ring inside the radius, arrows as a filled
// triangle 24 px tall whose apex sits on the point. The arrow opens
// downward from the apex unless that would leave the image, in which case
// it opens upward. Throws OutOfBounds on invalid geometry.
void DrawRegionMarker(Raster& raster, const RegionAnnotation& region);

// Decodes, draws and re-encodes in the input's format.
std::vector<uint8_t> RenderRegionMarker(std::span<const uint8_t> image_bytes,
                                        const RegionAnnotation& region);

// Reads the image named by `image.uri` (a path or file:// URI).
std::vector<uint8_t> RenderRegionMarker(const ImageRef& image,
                                        const RegionAnnotation& region);

}  // namespace pfkit

#endif  // PFKIT_CORPUS_REGION_MARKER_H_
