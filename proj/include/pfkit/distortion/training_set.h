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

#ifndef PFKIT_DISTORTION_TRAINING_SET_H_
#define PFKIT_DISTORTION_TRAINING_SET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfkit/corpus/sample.h"
#include "pfkit/distortion/caption_bbox.h"
#include "pfkit/distortion/command_pool.h"
#include "pfkit/json_io.h"

namespace pfkit {

enum class DistortionStrategy { kLlmInstructed, kTextAugment, kCaptionBbox };

std::string_view StrategyName(DistortionStrategy strategy);
DistortionStrategy ParseStrategy(std::string_view name);

// One (original, distorted) pair for training the rewriter. For
// kLlmInstructed the distorted text stays pending until a generation
// endpoint fills it in from `distortion_prompt`.
struct DistortionRecord {
  std::string sample_id;
  DistortionStrategy strategy = DistortionStrategy::kTextAugment;
  std::string original_response;
  std::optional<std::string> distorted_response;
  std::optional<std::string> distortion_prompt;
  std::optional<int> command_index;
  uint64_t rng_seed = 0;
  // Carried along so a record is a self-contained training example.
  std::string instruction;
  std::vector<std::string> image_uris;

  bool pending() const { return !distorted_response.has_value(); }
  bool operator==(const DistortionRecord&) const = default;
};

std::vector<std::string> CheckDistortionRecord(const DistortionRecord& record);

Json ToJson(const DistortionRecord& record);
DistortionRecord DistortionRecordFromJson(const Json& json);

// A detailed-description sample with the captions and boxes it was written
// from.
struct CaptionSource {
  InstructionSample sample;
  std::vector<std::string> captions;
  std::vector<LabeledBox> boxes;
};

Json ToJson(const CaptionSource& source);
// Boxes are {"category": str, "bbox": [x1, y1, x2, y2]} in pixels.
CaptionSource CaptionSourceFromJson(const Json& json);

struct MixCounts {
  int64_t llm_multimodal = 133000;
  int64_t llm_text = 76000;
  int64_t text_augment = 77000;
  int64_t caption_bbox = 14000;

  int64_t total() const {
    return llm_multimodal + llm_text + text_augment + caption_bbox;
  }
  // Every count multiplied by `factor` and rounded to nearest.
  MixCounts Scaled(double factor) const;
  // Reads {"llm_multimodal", "llm_text", "text_augment", "caption_bbox",
  // "scale"}; missing keys keep their defaults.
  static MixCounts FromJson(const Json& json);
  bool operator==(const MixCounts&) const = default;
};

// Draws the rewriter training mixture. Sources:
//   "multimodal" -> llm_multimodal records
//   "text"       -> llm_text records
//   "augment"    -> text_augment records, from multimodal+text samples not
//                   used for LLM distortion
//   "caption"    -> caption_bbox records, never sharing an id with an
//                   LLM-distorted multimodal sample
// Selection and per-record randomness are keyed by sample id, so the input
// order does not affect the output. Throws InsufficientSource.
std::vector<DistortionRecord> AssembleRewriterTrainingSet(
    const std::vector<InstructionSample>& multimodal,
    const std::vector<InstructionSample>& text,
    const std::vector<CaptionSource>& captions, const MixCounts& counts,
    uint64_t seed, const CommandPool& pool = CommandPool::Builtin());

}  // namespace pfkit

#endif  // PFKIT_DISTORTION_TRAINING_SET_H_
