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

#ifndef PFKIT_GATEWAY_REWRITE_PROMPT_H_
#define PFKIT_GATEWAY_REWRITE_PROMPT_H_

#include <cstddef>
#include <string>
#include <string_view>

#include "pfkit/corpus/sample.h"
#include "pfkit/distortion/training_set.h"

namespace pfkit {

inline constexpr std::string_view kRewriteInstruction =
    "Rewrite the draft above into a helpful, detailed, and polite response. "
    "Keep every fact the draft states and use what you see in the image.";

// Prompt asking the rewriter to polish a raw annotation. One image token
// per image precedes the instruction; the prompt ends right after the
// assistant marker so the completion is the polished response.
std::string RenderRewritePrompt(std::string_view instruction, size_t image_count,
                                std::string_view draft);

// Throws MissingRawAnnotation.
std::string AssembleRewritePrompt(const InstructionSample& sample);

// Training view of the same assembly: the distorted text takes the draft
// slot and the original response is the target. Loss applies to
// text[target_begin, text.size()) only.
struct RewriterTrainingExample {
  std::string text;
  size_t target_begin = 0;
};

RewriterTrainingExample AssembleRewriterTrainingExample(
    const DistortionRecord& record, std::string_view eos_marker = "</s>");

}  // namespace pfkit

#endif  // PFKIT_GATEWAY_REWRITE_PROMPT_H_
