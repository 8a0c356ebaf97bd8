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

#ifndef PFKIT_CORPUS_ADAPTER_H_
#define PFKIT_CORPUS_ADAPTER_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfkit/corpus/sample.h"
#include "pfkit/json_io.h"

namespace pfkit {

// A string with {field} placeholders resolved against a source record.
// "{field?}" renders empty when the field is absent; "{{" and "}}" are
// literal braces. Dotted names ("a.b") walk nested objects. Arrays render
// as their elements joined by the adapter's list separator.
class FieldTemplate {
 public:
  FieldTemplate() = default;
  // Throws BadConfig on unbalanced braces or empty placeholders.
  explicit FieldTemplate(std::string_view source);

  std::string Render(const Json& record, std::string_view list_separator) const;
  bool empty() const { return parts_.empty(); }
  const std::string& source() const { return source_; }

 private:
  struct Part {
    std::string text;  // literal text, or the field path for placeholders
    bool is_field = false;
    bool optional = false;
  };
  std::string source_;
  std::vector<Part> parts_;
};

struct ImageFieldSpec {
  FieldTemplate uri;
  std::string width_field;
  std::string height_field;
};

struct RegionFieldSpec {
  std::string field;
  RegionKind kind = RegionKind::kBox;
  std::string format;  // "xyxy", "xywh", "circle" or "point"
  MarkerColor color = MarkerColor::kGreen;
  size_t image_index = 0;
};

// Declarative description of how one source dataset maps onto
// InstructionSample. Loaded from JSON; no per-dataset code.
struct AdapterConfig {
  std::string name;
  std::string source_dataset;
  Category category = Category::kTextOnly;
  FieldTemplate id;
  FieldTemplate instruction;
  FieldTemplate response;
  std::optional<FieldTemplate> raw_annotation;
  // Captioning: field holding one caption or a list of captions, and an
  // optional field of object boxes ({category, bbox}).
  std::string captions_field;
  std::string boxes_field;
  std::string box_format = "xyxy";
  std::vector<ImageFieldSpec> images;
  std::optional<RegionFieldSpec> region;
  std::map<std::string, FieldTemplate> metadata;
  std::string list_separator = "\n";

  // Throws BadConfig.
  static AdapterConfig FromJson(const Json& json);
};

// Throws SchemaError naming the first missing or ill-typed field.
InstructionSample ConvertToUnified(const Json& record,
                                   const AdapterConfig& adapter);

class AdapterRegistry {
 public:
  // Loads every *.json adapter config in `dir`.
  static AdapterRegistry LoadDirectory(const std::filesystem::path& dir);

  void Add(AdapterConfig config);
  // Throws UnknownAdapter.
  const AdapterConfig& Find(std::string_view name) const;
  std::vector<std::string> Names() const;

 private:
  std::map<std::string, AdapterConfig, std::less<>> adapters_;
};

}  // namespace pfkit

#endif  // PFKIT_CORPUS_ADAPTER_H_
