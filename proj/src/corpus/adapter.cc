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

#include "pfkit/corpus/adapter.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pfkit/distortion/caption_bbox.h"
#include "pfkit/errors.h"
#include "pfkit/text_util.h"

namespace pfkit {
namespace {

const Json* Lookup(const Json& record, std::string_view path) {
  const Json* node = &record;
  size_t start = 0;
  while (true) {
    size_t dot = path.find('.', start);
    std::string_view key = path.substr(start, dot == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : dot - start);
    if (!node->is_object()) return nullptr;
    auto it = node->find(key);
    if (it == node->end() || it->is_null()) return nullptr;
    node = &*it;
    if (dot == std::string_view::npos) return node;
    start = dot + 1;
  }
}

std::string FormatNumber(const Json& value) {
  if (value.is_number_integer()) return std::to_string(value.get<int64_t>());
  if (value.is_number_unsigned()) return std::to_string(value.get<uint64_t>());
  const double d = value.get<double>();
  if (std::floor(d) == d && std::fabs(d) < 1e15) {
    return std::to_string(static_cast<int64_t>(d));
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", d);
  return buf;
}

std::string RenderScalar(const Json& value, const std::string& field) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number()) return FormatNumber(value);
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  throw SchemaError(field, "ill-typed");
}

double NumberAt(const Json& record, const std::string& field) {
  const Json* value = Lookup(record, field);
  if (value == nullptr) throw SchemaError(field, "missing");
  if (!value->is_number()) throw SchemaError(field, "not a number");
  return value->get<double>();
}

std::vector<double> NumberArray(const Json& value, const std::string& field) {
  if (!value.is_array()) throw SchemaError(field, "not an array");
  std::vector<double> out;
  for (const Json& v : value) {
    if (!v.is_number()) throw SchemaError(field, "not a number");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string GetString(const Json& json, std::string_view key, bool required) {
  auto it = json.find(key);
  if (it == json.end() || it->is_null()) {
    if (required) throw BadConfig("adapter config needs '" + std::string(key) + "'");
    return "";
  }
  if (!it->is_string()) {
    throw BadConfig("adapter config '" + std::string(key) + "' must be a string");
  }
  return it->get<std::string>();
}

MarkerColor ParseColor(const std::string& name) {
  if (name.empty() || name == "green") return MarkerColor::kGreen;
  if (name == "red") return MarkerColor::kRed;
  if (name == "blue") return MarkerColor::kBlue;
  throw BadConfig("unknown marker color '" + name + "'");
}

std::vector<double> ToBoxXyxy(std::vector<double> c, const std::string& format,
                              const std::string& field) {
  if (c.size() != 4) throw SchemaError(field, "box needs 4 numbers");
  if (format == "xywh") {
    c[2] += c[0];
    c[3] += c[1];
  }
  return c;
}

}  // namespace

FieldTemplate::FieldTemplate(std::string_view source) : source_(source) {
  std::string literal;
  size_t i = 0;
  while (i < source.size()) {
    const char c = source[i];
    if (c == '{' && i + 1 < source.size() && source[i + 1] == '{') {
      literal.push_back('{');
      i += 2;
      continue;
    }
    if (c == '}' && i + 1 < source.size() && source[i + 1] == '}') {
      literal.push_back('}');
      i += 2;
      continue;
    }
    if (c == '}') throw BadConfig("unbalanced '}' in template: " + source_);
    if (c == '{') {
      size_t close = source.find('}', i + 1);
      if (close == std::string_view::npos) {
        throw BadConfig("unterminated placeholder in template: " + source_);
      }
      std::string name(source.substr(i + 1, close - i - 1));
      bool optional = false;
      if (!name.empty() && name.back() == '?') {
        optional = true;
        name.pop_back();
      }
      if (name.empty() || name.find('{') != std::string::npos) {
        throw BadConfig("bad placeholder in template: " + source_);
      }
      if (!literal.empty()) parts_.push_back({std::move(literal), false, false});
      literal.clear();
      parts_.push_back({std::move(name), true, optional});
      i = close + 1;
      continue;
    }
    literal.push_back(c);
    ++i;
  }
  if (!literal.empty()) parts_.push_back({std::move(literal), false, false});
}

std::string FieldTemplate::Render(const Json& record,
                                  std::string_view list_separator) const {
  std::string out;
  for (const Part& part : parts_) {
    if (!part.is_field) {
      out += part.text;
      continue;
    }
    const Json* value = Lookup(record, part.text);
    if (value == nullptr) {
      if (part.optional) continue;
      throw SchemaError(part.text, "missing");
    }
    std::string rendered;
    if (value->is_array()) {
      std::vector<std::string> items;
      for (const Json& item : *value) {
        std::string s = Trim(RenderScalar(item, part.text));
        if (!s.empty()) items.push_back(std::move(s));
      }
      rendered = Join(items, list_separator);
    } else {
      rendered = RenderScalar(*value, part.text);
    }
    if (Trim(rendered).empty() && !part.optional) {
      throw SchemaError(part.text, "empty");
    }
    out += rendered;
  }
  return Trim(out);
}

AdapterConfig AdapterConfig::FromJson(const Json& json) {
  if (!json.is_object()) throw BadConfig("adapter config must be an object");
  AdapterConfig a;
  a.name = GetString(json, "name", true);
  a.source_dataset = GetString(json, "source_dataset", false);
  if (a.source_dataset.empty()) a.source_dataset = a.name;
  try {
    a.category = ParseCategory(GetString(json, "category", true));
  } catch (const SchemaError&) {
    throw BadConfig("adapter '" + a.name + "' has unknown category");
  }
  a.id = FieldTemplate(GetString(json, "id", true));
  a.instruction = FieldTemplate(GetString(json, "instruction", true));
  a.response = FieldTemplate(GetString(json, "response", false));
  if (std::string raw = GetString(json, "raw_annotation", false); !raw.empty()) {
    a.raw_annotation = FieldTemplate(raw);
  }
  a.captions_field = GetString(json, "captions", false);
  a.boxes_field = GetString(json, "boxes", false);
  if (std::string f = GetString(json, "box_format", false); !f.empty()) {
    a.box_format = f;
  }
  if (a.box_format != "xyxy" && a.box_format != "xywh") {
    throw BadConfig("box_format must be xyxy or xywh");
  }
  if (auto it = json.find("list_separator"); it != json.end()) {
    a.list_separator = GetString(json, "list_separator", true);
  }
  if (auto it = json.find("images"); it != json.end() && !it->is_null()) {
    if (!it->is_array()) throw BadConfig("'images' must be an array");
    for (const Json& spec : *it) {
      ImageFieldSpec image;
      image.uri = FieldTemplate(GetString(spec, "uri", true));
      image.width_field = GetString(spec, "width", true);
      image.height_field = GetString(spec, "height", true);
      a.images.push_back(std::move(image));
    }
  }
  if (auto it = json.find("region"); it != json.end() && !it->is_null()) {
    RegionFieldSpec region;
    region.field = GetString(*it, "field", true);
    region.format = GetString(*it, "format", true);
    if (region.format == "xyxy" || region.format == "xywh") {
      region.kind = RegionKind::kBox;
    } else if (region.format == "circle") {
      region.kind = RegionKind::kCircle;
    } else if (region.format == "point") {
      region.kind = RegionKind::kArrow;
    } else {
      throw BadConfig("region format must be xyxy, xywh, circle or point");
    }
    region.color = ParseColor(GetString(*it, "color", false));
    if (auto idx = it->find("image"); idx != it->end()) {
      if (!idx->is_number_unsigned()) throw BadConfig("region image index");
      region.image_index = idx->get<size_t>();
    }
    if (region.image_index >= a.images.size()) {
      throw BadConfig("region refers to a missing image slot");
    }
    a.region = region;
  }
  if (auto it = json.find("metadata"); it != json.end() && !it->is_null()) {
    if (!it->is_object()) throw BadConfig("'metadata' must be an object");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) throw BadConfig("metadata templates are strings");
      a.metadata.emplace(key, FieldTemplate(value.get<std::string>()));
    }
  }

  const bool text_only = a.category == Category::kTextOnly;
  if (text_only && !a.images.empty()) {
    throw BadConfig("text_only adapter '" + a.name + "' declares images");
  }
  if (!text_only && a.images.empty()) {
    throw BadConfig("adapter '" + a.name + "' declares no images");
  }
  if (a.category == Category::kCaptioning) {
    if (a.captions_field.empty() && a.response.empty()) {
      throw BadConfig("captioning adapter needs 'captions' or 'response'");
    }
  } else if (a.response.empty()) {
    throw BadConfig("adapter '" + a.name + "' needs a 'response' template");
  }
  return a;
}

InstructionSample ConvertToUnified(const Json& record,
                                   const AdapterConfig& adapter) {
  if (!record.is_object()) throw SchemaError("<record>", "not an object");
  const std::string_view sep = adapter.list_separator;
  InstructionSample s;
  s.source_dataset = adapter.source_dataset;
  s.category = adapter.category;
  s.id = adapter.id.Render(record, sep);
  if (s.id.empty()) throw SchemaError("id", "empty");
  s.instruction = adapter.instruction.Render(record, sep);
  if (s.instruction.empty()) throw SchemaError("instruction", "empty");

  for (const ImageFieldSpec& spec : adapter.images) {
    ImageRef image;
    image.uri = spec.uri.Render(record, sep);
    const double w = NumberAt(record, spec.width_field);
    const double h = NumberAt(record, spec.height_field);
    if (!(w >= 1) || !(h >= 1)) {
      throw SchemaError(w >= 1 ? spec.height_field : spec.width_field,
                        "must be positive");
    }
    image.width_px = static_cast<int>(w);
    image.height_px = static_cast<int>(h);
    s.images.push_back(std::move(image));
  }

  if (!adapter.captions_field.empty()) {
    const std::string& field = adapter.captions_field;
    const Json* value = Lookup(record, field);
    if (value == nullptr) throw SchemaError(field, "missing");
    std::vector<std::string> captions;
    if (value->is_string()) {
      captions.push_back(Trim(value->get<std::string>()));
    } else if (value->is_array()) {
      for (const Json& c : *value) {
        if (!c.is_string()) throw SchemaError(field, "not a string");
        captions.push_back(Trim(c.get<std::string>()));
      }
    } else {
      throw SchemaError(field, "ill-typed");
    }
    bool any = false;
    for (const auto& c : captions) any = any || !c.empty();
    if (!any) throw SchemaError(field, "empty");

    std::vector<LabeledBox> boxes;
    if (!adapter.boxes_field.empty()) {
      if (const Json* list = Lookup(record, adapter.boxes_field)) {
        if (!list->is_array()) throw SchemaError(adapter.boxes_field, "not an array");
        for (const Json& item : *list) {
          LabeledBox box;
          const Json* label = Lookup(item, "category");
          if (label == nullptr || !label->is_string()) {
            throw SchemaError(adapter.boxes_field + ".category", "missing");
          }
          box.category = label->get<std::string>();
          const Json* bbox = Lookup(item, "bbox");
          if (bbox == nullptr) throw SchemaError(adapter.boxes_field + ".bbox", "missing");
          std::vector<double> c = ToBoxXyxy(
              NumberArray(*bbox, adapter.boxes_field + ".bbox"), adapter.box_format,
              adapter.boxes_field + ".bbox");
          box.x1 = c[0];
          box.y1 = c[1];
          box.x2 = c[2];
          box.y2 = c[3];
          boxes.push_back(std::move(box));
        }
      }
    }
    const int w = s.images.empty() ? 0 : s.images[0].width_px;
    const int h = s.images.empty() ? 0 : s.images[0].height_px;
    std::string raw = CaptionBboxDistortion(captions, boxes, w, h);
    s.raw_annotation = raw;
    s.response = adapter.response.empty() ? raw : adapter.response.Render(record, sep);
  } else {
    s.response = adapter.response.Render(record, sep);
    if (s.response.empty()) throw SchemaError("response", "empty");
  }
  if (adapter.raw_annotation) {
    s.raw_annotation = adapter.raw_annotation->Render(record, sep);
  } else if (!s.raw_annotation) {
    s.raw_annotation = s.response;
  }

  if (adapter.region) {
    const RegionFieldSpec& spec = *adapter.region;
    const Json* value = Lookup(record, spec.field);
    if (value == nullptr) throw SchemaError(spec.field, "missing");
    RegionAnnotation region;
    region.kind = spec.kind;
    region.color = spec.color;
    std::vector<double> coords = NumberArray(*value, spec.field);
    if (spec.kind == RegionKind::kBox) coords = ToBoxXyxy(coords, spec.format, spec.field);
    region.coords = std::move(coords);
    ImageRef& image = s.images.at(spec.image_index);
    if (std::string issue = CheckRegion(region, image.width_px, image.height_px);
        !issue.empty()) {
      throw SchemaError(spec.field, issue);
    }
    image.regions.push_back(std::move(region));
  }

  s.metadata["adapter"] = adapter.name;
  for (const auto& [key, tmpl] : adapter.metadata) {
    std::string v = tmpl.Render(record, sep);
    if (!v.empty()) s.metadata[key] = std::move(v);
  }

  if (std::vector<std::string> problems = CheckSample(s); !problems.empty()) {
    throw SchemaError("<sample>", problems.front());
  }
  return s;
}

AdapterRegistry AdapterRegistry::LoadDirectory(const std::filesystem::path& dir) {
  AdapterRegistry registry;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("adapter directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) registry.Add(AdapterConfig::FromJson(ReadJsonFile(f)));
  return registry;
}

void AdapterRegistry::Add(AdapterConfig config) {
  std::string name = config.name;
  adapters_.insert_or_assign(std::move(name), std::move(config));
}

const AdapterConfig& AdapterRegistry::Find(std::string_view name) const {
  auto it = adapters_.find(name);
  if (it == adapters_.end()) throw UnknownAdapter(std::string(name));
  return it->second;
}

std::vector<std::string> AdapterRegistry::Names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : adapters_) names.push_back(name);
  return names;
}

}  // namespace pfkit
