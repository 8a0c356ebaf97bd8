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

#include "pfkit/distortion/training_set.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "pfkit/distortion/llm_prompt.h"
#include "pfkit/distortion/text_augment.h"
#include "pfkit/errors.h"
#include "pfkit/random.h"

namespace pfkit {
namespace {

// Seed-keyed ranking: the first k by key are the selected samples.
std::vector<const InstructionSample*> SelectRanked(
    const std::vector<const InstructionSample*>& pool, int64_t k, uint64_t seed,
    std::string_view pool_name) {
  if (k < 0) throw BadConfig("negative count for " + std::string(pool_name));
  if (static_cast<int64_t>(pool.size()) < k) {
    throw InsufficientSource(std::string(pool_name),
                             k - static_cast<int64_t>(pool.size()));
  }
  std::vector<std::pair<uint64_t, const InstructionSample*>> ranked;
  ranked.reserve(pool.size());
  const std::string prefix = "select:" + std::string(pool_name) + ":";
  for (const InstructionSample* s : pool) {
    ranked.emplace_back(DeriveSeed(seed, prefix + s->id), s);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second->id < b.second->id;
  });
  std::vector<const InstructionSample*> out;
  for (int64_t i = 0; i < k; ++i) out.push_back(ranked[static_cast<size_t>(i)].second);
  return out;
}

std::vector<std::string> ImageUris(const InstructionSample& s) {
  std::vector<std::string> uris;
  for (const auto& image : s.images) uris.push_back(image.uri);
  return uris;
}

DistortionRecord BaseRecord(const InstructionSample& s, DistortionStrategy strategy,
                            uint64_t seed) {
  DistortionRecord r;
  r.sample_id = s.id;
  r.strategy = strategy;
  r.original_response = s.response;
  r.rng_seed = DeriveSeed(seed, s.id);
  r.instruction = s.instruction;
  r.image_uris = ImageUris(s);
  return r;
}

DistortionRecord LlmRecord(const InstructionSample& s, uint64_t seed,
                           const CommandPool& pool) {
  DistortionRecord r = BaseRecord(s, DistortionStrategy::kLlmInstructed, seed);
  Rng rng(r.rng_seed);
  DistortionPrompt prompt = BuildLlmDistortionPrompt(s, rng, pool);
  r.distortion_prompt = std::move(prompt.prompt);
  r.command_index = prompt.command_index;
  return r;
}

DistortionRecord AugmentRecord(const InstructionSample& s, uint64_t seed) {
  DistortionRecord r = BaseRecord(s, DistortionStrategy::kTextAugment, seed);
  if (s.response.empty()) throw EmptyResponse(s.id);
  Rng rng(r.rng_seed);
  std::string distorted;
  for (int attempt = 0; attempt < 8; ++attempt) {
    distorted = RandomTextAugment(s.response, rng).text;
    if (distorted != s.response) break;
  }
  if (distorted == s.response) {
    const size_t first = 0;
    distorted = ApplyCharOp(s.response, CharOp::kInsert, std::span(&first, 1), rng);
  }
  r.distorted_response = std::move(distorted);
  return r;
}

}  // namespace

std::string_view StrategyName(DistortionStrategy strategy) {
  switch (strategy) {
    case DistortionStrategy::kLlmInstructed:
      return "llm_instructed";
    case DistortionStrategy::kTextAugment:
      return "text_augment";
    case DistortionStrategy::kCaptionBbox:
      return "caption_bbox";
  }
  return "text_augment";
}

DistortionStrategy ParseStrategy(std::string_view name) {
  if (name == "llm_instructed") return DistortionStrategy::kLlmInstructed;
  if (name == "text_augment") return DistortionStrategy::kTextAugment;
  if (name == "caption_bbox") return DistortionStrategy::kCaptionBbox;
  throw SchemaError("strategy", "unknown value '" + std::string(name) + "'");
}

std::vector<std::string> CheckDistortionRecord(const DistortionRecord& r) {
  std::vector<std::string> problems;
  if (r.sample_id.empty()) problems.push_back("empty sample_id");
  if (r.strategy == DistortionStrategy::kLlmInstructed && !r.distortion_prompt) {
    problems.push_back("llm_instructed record without distortion_prompt");
  }
  if (r.command_index &&
      (*r.command_index < 0 || *r.command_index >= static_cast<int>(kCommandPoolSize))) {
    problems.push_back("command_index out of range");
  }
  if (r.command_index && r.strategy != DistortionStrategy::kLlmInstructed) {
    problems.push_back("command_index on a non-LLM record");
  }
  if (r.distorted_response && *r.distorted_response == r.original_response) {
    problems.push_back("distorted_response equals original_response");
  }
  if (r.strategy != DistortionStrategy::kLlmInstructed && !r.distorted_response) {
    problems.push_back("only llm_instructed records may be pending");
  }
  return problems;
}

Json ToJson(const DistortionRecord& r) {
  Json j;
  j["sample_id"] = r.sample_id;
  j["strategy"] = StrategyName(r.strategy);
  j["original_response"] = r.original_response;
  j["distorted_response"] = r.distorted_response ? Json(*r.distorted_response) : Json();
  j["distortion_prompt"] = r.distortion_prompt ? Json(*r.distortion_prompt) : Json();
  j["command_index"] = r.command_index ? Json(*r.command_index) : Json();
  j["rng_seed"] = r.rng_seed;
  j["instruction"] = r.instruction;
  j["image_uris"] = r.image_uris;
  return j;
}

DistortionRecord DistortionRecordFromJson(const Json& json) {
  DistortionRecord r;
  r.sample_id = RequireString(json, "sample_id");
  r.strategy = ParseStrategy(RequireString(json, "strategy"));
  r.original_response = RequireString(json, "original_response", true);
  auto optional_string = [&](std::string_view key) -> std::optional<std::string> {
    auto it = json.find(key);
    if (it == json.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw SchemaError(std::string(key), "not a string");
    return it->get<std::string>();
  };
  r.distorted_response = optional_string("distorted_response");
  r.distortion_prompt = optional_string("distortion_prompt");
  if (auto it = json.find("command_index"); it != json.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw SchemaError("command_index", "not an integer");
    r.command_index = it->get<int>();
  }
  const Json& seed = RequireField(json, "rng_seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    throw SchemaError("rng_seed", "not an integer");
  }
  r.rng_seed = seed.get<uint64_t>();
  r.instruction = optional_string("instruction").value_or("");
  if (auto it = json.find("image_uris"); it != json.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("image_uris", "not an array");
    for (const Json& u : *it) {
      if (!u.is_string()) throw SchemaError("image_uris", "not a string");
      r.image_uris.push_back(u.get<std::string>());
    }
  }
  return r;
}

Json ToJson(const CaptionSource& source) {
  Json j;
  j["sample"] = ToJson(source.sample);
  j["captions"] = source.captions;
  Json boxes = Json::array();
  for (const auto& b : source.boxes) {
    boxes.push_back(Json{{"category", b.category}, {"bbox", {b.x1, b.y1, b.x2, b.y2}}});
  }
  j["boxes"] = std::move(boxes);
  return j;
}

CaptionSource CaptionSourceFromJson(const Json& json) {
  CaptionSource source;
  source.sample = SampleFromJson(RequireField(json, "sample"));
  if (auto it = json.find("captions"); it != json.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("captions", "not an array");
    for (const Json& c : *it) {
      if (!c.is_string()) throw SchemaError("captions", "not a string");
      source.captions.push_back(c.get<std::string>());
    }
  }
  if (auto it = json.find("boxes"); it != json.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("boxes", "not an array");
    for (const Json& b : *it) {
      LabeledBox box;
      box.category = RequireString(b, "category");
      const Json& bbox = RequireField(b, "bbox");
      if (!bbox.is_array() || bbox.size() != 4) throw SchemaError("bbox", "needs 4 numbers");
      for (const Json& v : bbox) {
        if (!v.is_number()) throw SchemaError("bbox", "not a number");
      }
      box.x1 = bbox[0].get<double>();
      box.y1 = bbox[1].get<double>();
      box.x2 = bbox[2].get<double>();
      box.y2 = bbox[3].get<double>();
      source.boxes.push_back(std::move(box));
    }
  }
  return source;
}

MixCounts MixCounts::Scaled(double factor) const {
  auto scale = [factor](int64_t v) {
    return static_cast<int64_t>(std::llround(static_cast<double>(v) * factor));
  };
  return {scale(llm_multimodal), scale(llm_text), scale(text_augment),
          scale(caption_bbox)};
}

MixCounts MixCounts::FromJson(const Json& json) {
  MixCounts counts;
  if (json.is_null()) return counts;
  if (!json.is_object()) throw BadConfig("mix config must be an object");
  auto read = [&](std::string_view key, int64_t& out) {
    if (auto it = json.find(key); it != json.end()) {
      if (!it->is_number_integer() || it->get<int64_t>() < 0) {
        throw BadConfig("mix." + std::string(key) + " must be a non-negative integer");
      }
      out = it->get<int64_t>();
    }
  };
  read("llm_multimodal", counts.llm_multimodal);
  read("llm_text", counts.llm_text);
  read("text_augment", counts.text_augment);
  read("caption_bbox", counts.caption_bbox);
  if (auto it = json.find("scale"); it != json.end()) {
    if (!it->is_number() || it->get<double>() <= 0) {
      throw BadConfig("mix.scale must be positive");
    }
    counts = counts.Scaled(it->get<double>());
  }
  return counts;
}

std::vector<DistortionRecord> AssembleRewriterTrainingSet(
    const std::vector<InstructionSample>& multimodal,
    const std::vector<InstructionSample>& text,
    const std::vector<CaptionSource>& captions, const MixCounts& counts,
    uint64_t seed, const CommandPool& pool) {
  std::vector<const InstructionSample*> mm_pool;
  for (const auto& s : multimodal) mm_pool.push_back(&s);
  std::vector<const InstructionSample*> text_pool;
  for (const auto& s : text) text_pool.push_back(&s);

  const auto llm_mm = SelectRanked(mm_pool, counts.llm_multimodal, seed, "multimodal");
  const auto llm_text = SelectRanked(text_pool, counts.llm_text, seed, "text");

  std::unordered_set<std::string> llm_ids;
  for (const auto* s : llm_mm) llm_ids.insert(s->id);
  std::unordered_set<std::string> llm_text_ids;
  for (const auto* s : llm_text) llm_text_ids.insert(s->id);

  std::vector<const InstructionSample*> augment_pool;
  std::unordered_set<std::string> seen;
  for (const auto* pool_ptr : {&mm_pool, &text_pool}) {
    for (const InstructionSample* s : *pool_ptr) {
      if (llm_ids.count(s->id) || llm_text_ids.count(s->id)) continue;
      if (!seen.insert(s->id).second) continue;
      augment_pool.push_back(s);
    }
  }
  const auto augment = SelectRanked(augment_pool, counts.text_augment, seed, "augment");

  std::vector<const InstructionSample*> caption_pool;
  std::unordered_map<std::string, const CaptionSource*> caption_by_id;
  for (const auto& c : captions) {
    if (llm_ids.count(c.sample.id)) continue;
    if (!caption_by_id.emplace(c.sample.id, &c).second) continue;
    caption_pool.push_back(&c.sample);
  }
  const auto caption = SelectRanked(caption_pool, counts.caption_bbox, seed, "caption");

  std::vector<DistortionRecord> records;
  records.reserve(static_cast<size_t>(counts.total()));
  for (const auto* s : llm_mm) records.push_back(LlmRecord(*s, seed, pool));
  for (const auto* s : llm_text) records.push_back(LlmRecord(*s, seed, pool));
  for (const auto* s : augment) records.push_back(AugmentRecord(*s, seed));
  for (const auto* s : caption) {
    const CaptionSource& source = *caption_by_id.at(s->id);
    DistortionRecord r = BaseRecord(*s, DistortionStrategy::kCaptionBbox, seed);
    const int w = s->images.empty() ? 0 : s->images[0].width_px;
    const int h = s->images.empty() ? 0 : s->images[0].height_px;
    r.distorted_response = CaptionBboxDistortion(source.captions, source.boxes, w, h);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace pfkit
