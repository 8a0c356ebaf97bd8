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

#include "pfkit/gateway/rewrite_prompt.h"

#include "pfkit/chat_format.h"
#include "pfkit/errors.h"

namespace pfkit {

std::string RenderRewritePrompt(std::string_view instruction, size_t image_count,
                                std::string_view draft) {
  std::string p;
  p.append(kSystemMessage).append("\n");
  p.append(kHumanMarker).append(" ");
  for (size_t i = 0; i < image_count; ++i) p.append(kImageToken);
  p.append(instruction).append("\n");
  p.append("Draft response: \"").append(draft).append("\"\n");
  p.append(kRewriteInstruction).append("\n");
  p.append(kAssistantMarker).append(" ");
  return p;
}

std::string AssembleRewritePrompt(const InstructionSample& sample) {
  if (!sample.raw_annotation || sample.raw_annotation->empty()) {
    throw MissingRawAnnotation(sample.id);
  }
  return RenderRewritePrompt(sample.instruction, sample.images.size(),
                             *sample.raw_annotation);
}

RewriterTrainingExample AssembleRewriterTrainingExample(
    const DistortionRecord& record, std::string_view eos_marker) {
  if (!record.distorted_response) throw MissingRawAnnotation(record.sample_id);
  RewriterTrainingExample example;
  example.text = RenderRewritePrompt(record.instruction, record.image_uris.size(),
                                     *record.distorted_response);
  example.target_begin = example.text.size();
  example.text.append(record.original_response).append(eos_marker);
  return example;
}

}  // namespace pfkit
