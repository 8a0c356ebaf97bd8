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

#include "pfkit/distortion/caption_bbox.h"

#include <cstdio>

#include "pfkit/errors.h"
#include "pfkit/text_util.h"

namespace pfkit {
namespace {

std::string Coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string CaptionBboxDistortion(const std::vector<std::string>& captions,
                                  const std::vector<LabeledBox>& boxes,
                                  int width_px, int height_px) {
  std::vector<std::string> lines;
  for (const auto& caption : captions) {
    std::string c = Trim(caption);
    if (!c.empty()) lines.push_back(std::move(c));
  }
  if (lines.empty() && boxes.empty()) {
    throw EmptyInput("no captions and no boxes");
  }
  if (!boxes.empty()) {
    if (width_px <= 0 || height_px <= 0) {
      throw BadConfig("box normalization needs positive image dimensions");
    }
    lines.emplace_back(kObjectLocationPreamble);
    const double w = width_px;
    const double h = height_px;
    for (const auto& box : boxes) {
      lines.push_back(box.category + ": [" + Coord(box.x1 / w) + ", " +
                      Coord(box.y1 / h) + ", " + Coord(box.x2 / w) + ", " +
                      Coord(box.y2 / h) + "]");
    }
  }
  return Join(lines, "\n");
}

}  // namespace pfkit
