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

#include "pfkit/corpus/sample.h"

#include <array>
#include <cmath>
#include <cstdio>

#include "pfkit/errors.h"

namespace pfkit {
namespace {

constexpr std::array<std::pair<Category, std::string_view>, 7> kCategoryNames{{
    {Category::kCaptioning, "captioning"},
    {Category::kClassification, "classification"},
    {Category::kChangeCaptioning, "change_captioning"},
    {Category::kVqaRationale, "vqa_rationale"},
    {Category::kVqaPlain, "vqa_plain"},
    {Category::kRegion, "region"},
    {Category::kTextOnly, "text_only"},
}};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string_view CategoryName(Category category) {
  for (const auto& [c, name] : kCategoryNames) {
    if (c == category) return name;
  }
  return "unknown";
}

Category ParseCategory(std::string_view name) {
  for (const auto& [c, n] : kCategoryNames) {
    if (n == name) return c;
  }
  throw SchemaError("category", "unknown value '" + std::string(name) + "'");
}

bool IsVqaCategory(Category category) {
  return category == Category::kVqaRationale || category == Category::kVqaPlain;
}

std::string_view RegionKindName(RegionKind kind) {
  switch (kind) {
    case RegionKind::kBox:
      return "box";
    case RegionKind::kCircle:
      return "circle";
    case RegionKind::kArrow:
      return "arrow";
  }
  return "box";
}

std::string_view MarkerColorName(MarkerColor color) {
  switch (color) {
    case MarkerColor::kGreen:
      return "green";
    case MarkerColor::kRed:
      return "red";
    case MarkerColor::kBlue:
      return "blue";
  }
  return "green";
}

std::string CheckRegion(const RegionAnnotation& region, int width_px,
                        int height_px) {
  for (double c : region.coords) {
    if (!std::isfinite(c)) return "non-finite coordinate";
  }
  const auto& c = region.coords;
  const double w = width_px;
  const double h = height_px;
  switch (region.kind) {
    case RegionKind::kBox:
      if (c.size() != 4) return "box needs 4 coordinates";
      if (!(c[0] < c[2]) || !(c[1] < c[3])) {
        return "degenerate box (" + Fmt(c[0]) + "," + Fmt(c[1]) + "," +
               Fmt(c[2]) + "," + Fmt(c[3]) + ")";
      }
      if (c[0] < 0 || c[1] < 0 || c[2] > w || c[3] > h) {
        return "box outside image bounds";
      }
      return "";
    case RegionKind::kCircle:
      if (c.size() != 3) return "circle needs 3 coordinates";
      if (!(c[2] > 0)) return "circle radius must be positive";
      if (c[0] < 0 || c[1] < 0 || c[0] >= w || c[1] >= h) {
        return "circle center outside image bounds";
      }
      return "";
    case RegionKind::kArrow:
      if (c.size() != 2) return "arrow needs 2 coordinates";
      if (c[0] < 0 || c[1] < 0 || c[0] >= w || c[1] >= h) {
        return "arrow tip outside image bounds";
      }
      return "";
  }
  return "unknown region kind";
}

std::vector<std::string> CheckSample(const InstructionSample& sample) {
  std::vector<std::string> problems;
  if (sample.id.empty()) problems.push_back("empty id");
  if (sample.instruction.empty()) problems.push_back("empty instruction");
  const bool text_only = sample.category == Category::kTextOnly;
  if (text_only && !sample.images.empty()) {
    problems.push_back("invariant violation: text_only sample carries images");
  }
  if (!text_only && sample.images.empty()) {
    problems.push_back("invariant violation: non-text_only sample has no images");
  }
  for (size_t i = 0; i < sample.images.size(); ++i) {
    const ImageRef& image = sample.images[i];
    const std::string where = "images[" + std::to_string(i) + "]";
    if (image.uri.empty()) problems.push_back(where + ": empty uri");
    if (image.width_px <= 0 || image.height_px <= 0) {
      problems.push_back(where + ": non-positive dimensions");
      continue;
    }
    for (size_t r = 0; r < image.regions.size(); ++r) {
      std::string issue =
          CheckRegion(image.regions[r], image.width_px, image.height_px);
      if (!issue.empty()) {
        problems.push_back(where + ".regions[" + std::to_string(r) +
                           "]: " + issue);
      }
    }
  }
  return problems;
}

Json ToJson(const RegionAnnotation& region) {
  Json j;
  j["kind"] = RegionKindName(region.kind);
  j["coords"] = region.coords;
  j["color"] = MarkerColorName(region.color);
  if (region.label) j["label"] = *region.label;
  return j;
}

Json ToJson(const ImageRef& image) {
  Json j;
  j["uri"] = image.uri;
  j["width_px"] = image.width_px;
  j["height_px"] = image.height_px;
  Json regions = Json::array();
  for (const auto& r : image.regions) regions.push_back(ToJson(r));
  j["regions"] = std::move(regions);
  return j;
}

Json ToJson(const InstructionSample& sample) {
  Json j;
  j["id"] = sample.id;
  j["source_dataset"] = sample.source_dataset;
  j["category"] = CategoryName(sample.category);
  j["instruction"] = sample.instruction;
  j["response"] = sample.response;
  j["raw_annotation"] =
      sample.raw_annotation ? Json(*sample.raw_annotation) : Json(nullptr);
  Json images = Json::array();
  for (const auto& image : sample.images) images.push_back(ToJson(image));
  j["images"] = std::move(images);
  Json metadata = Json::object();
  for (const auto& [k, v] : sample.metadata) metadata[k] = v;
  j["metadata"] = std::move(metadata);
  return j;
}

RegionAnnotation RegionFromJson(const Json& json) {
  RegionAnnotation region;
  const std::string kind = RequireString(json, "kind");
  if (kind == "box") {
    region.kind = RegionKind::kBox;
  } else if (kind == "circle") {
    region.kind = RegionKind::kCircle;
  } else if (kind == "arrow") {
    region.kind = RegionKind::kArrow;
  } else {
    throw SchemaError("kind", "unknown region kind '" + kind + "'");
  }
  const Json& coords = RequireField(json, "coords");
  if (!coords.is_array()) throw SchemaError("coords", "not an array");
  for (const Json& c : coords) {
    if (!c.is_number()) throw SchemaError("coords", "not a number");
    region.coords.push_back(c.get<double>());
  }
  const std::string color = RequireString(json, "color");
  if (color == "green") {
    region.color = MarkerColor::kGreen;
  } else if (color == "red") {
    region.color = MarkerColor::kRed;
  } else if (color == "blue") {
    region.color = MarkerColor::kBlue;
  } else {
    throw SchemaError("color", "unknown color '" + color + "'");
  }
  if (auto it = json.find("label"); it != json.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("label", "not a string");
    region.label = it->get<std::string>();
  }
  return region;
}

ImageRef ImageFromJson(const Json& json) {
  ImageRef image;
  image.uri = RequireString(json, "uri");
  image.width_px = static_cast<int>(RequireInt(json, "width_px"));
  image.height_px = static_cast<int>(RequireInt(json, "height_px"));
  if (auto it = json.find("regions"); it != json.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("regions", "not an array");
    for (const Json& r : *it) image.regions.push_back(RegionFromJson(r));
  }
  return image;
}

InstructionSample SampleFromJson(const Json& json) {
  if (!json.is_object()) throw SchemaError("<record>", "not an object");
  InstructionSample s;
  s.id = RequireString(json, "id");
  s.source_dataset = RequireString(json, "source_dataset", true);
  s.category = ParseCategory(RequireString(json, "category"));
  s.instruction = RequireString(json, "instruction");
  s.response = RequireString(json, "response", true);
  if (auto it = json.find("raw_annotation"); it != json.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("raw_annotation", "not a string");
    s.raw_annotation = it->get<std::string>();
  }
  if (auto it = json.find("images"); it != json.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("images", "not an array");
    for (const Json& image : *it) s.images.push_back(ImageFromJson(image));
  }
  if (auto it = json.find("metadata"); it != json.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaError("metadata", "not an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) throw SchemaError("metadata." + k, "not a string");
      s.metadata[k] = v.get<std::string>();
    }
  }
  return s;
}

}  // namespace pfkit
