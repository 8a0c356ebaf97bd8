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

#ifndef PFKIT_CORPUS_SAMPLE_H_
#define PFKIT_CORPUS_SAMPLE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfkit/json_io.h"

namespace pfkit {

enum class Category {
  kCaptioning,
  kClassification,
  kChangeCaptioning,
  kVqaRationale,
  kVqaPlain,
  kRegion,
  kTextOnly,
};

std::string_view CategoryName(Category category);
// Throws SchemaError("category") for unknown names.
Category ParseCategory(std::string_view name);
bool IsVqaCategory(Category category);

enum class RegionKind { kBox, kCircle, kArrow };
enum class MarkerColor { kGreen, kRed, kBlue };

std::string_view RegionKindName(RegionKind kind);
std::string_view MarkerColorName(MarkerColor color);

// Pixel coordinates; layout depends on kind:
//   box    -> x1, y1, x2, y2
//   circle -> cx, cy, r
//   arrow  -> x, y (tip)
struct RegionAnnotation {
  RegionKind kind = RegionKind::kBox;
  std::vector<double> coords;
  MarkerColor color = MarkerColor::kGreen;
  std::optional<std::string> label;

  bool operator==(const RegionAnnotation&) const = default;
};

struct ImageRef {
  std::string uri;
  int width_px = 0;
  int height_px = 0;
  std::vector<RegionAnnotation> regions;

  bool operator==(const ImageRef&) const = default;
};

struct InstructionSample {
  std::string id;
  std::string source_dataset;
  Category category = Category::kTextOnly;
  std::string instruction;
  std::string response;
  std::optional<std::string> raw_annotation;
  std::vector<ImageRef> images;
  std::map<std::string, std::string> metadata;

  bool operator==(const InstructionSample&) const = default;
};

// Geometry checks for one region against its image. Returns an empty string
// when valid, otherwise a description of the violation.
std::string CheckRegion(const RegionAnnotation& region, int width_px,
                        int height_px);

// Invariant violations of a single sample (id uniqueness is a corpus-level
// property and is checked by ValidateCorpus).
std::vector<std::string> CheckSample(const InstructionSample& sample);

Json ToJson(const RegionAnnotation& region);
Json ToJson(const ImageRef& image);
Json ToJson(const InstructionSample& sample);

RegionAnnotation RegionFromJson(const Json& json);
ImageRef ImageFromJson(const Json& json);
// Strict decoding; throws SchemaError naming the offending field.
InstructionSample SampleFromJson(const Json& json);

}  // namespace pfkit

#endif  // PFKIT_CORPUS_SAMPLE_H_
