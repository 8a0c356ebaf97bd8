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

#ifndef PFKIT_DISTORTION_CAPTION_BBOX_H_
#define PFKIT_DISTORTION_CAPTION_BBOX_H_

#include <string>
#include <string_view>
#include <vector>

namespace pfkit {

inline constexpr std::string_view kObjectLocationPreamble =
    "The followings are specific object locations within the image, "
    "represented as (category: [x1, y1, x2, y2]):";

// Pixel-space box with its category name.
struct LabeledBox {
  std::string category;
  double x1 = 0;
  double y1 = 0;
  double x2 = 0;
  double y2 = 0;
};

// Renders retrieved captions and object boxes as a low-quality stand-in for
// a detailed description: captions one per line, then (when boxes exist) the
// location preamble and one "category: [x1, y1, x2, y2]" line per box with
// coordinates normalized by the image size to three decimals.
//
// Blank captions are ignored. Throws EmptyInput when nothing remains, and
// BadConfig when boxes are given without positive image dimensions.
std::string CaptionBboxDistortion(const std::vector<std::string>& captions,
                                  const std::vector<LabeledBox>& boxes,
                                  int width_px, int height_px);

}  // namespace pfkit

#endif  // PFKIT_DISTORTION_CAPTION_BBOX_H_
