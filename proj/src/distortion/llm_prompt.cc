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

#include "pfkit/distortion/llm_prompt.h"

#include "pfkit/chat_format.h"
#include "pfkit/errors.h"
#include "pfkit/text_util.h"

namespace pfkit {

std::string RenderLlmDistortionPrompt(std::string_view instruction,
                                      std::string_view original_response,
                                      std::optional<std::string_view> command) {
  std::string p;
  p.reserve(1024 + instruction.size() + original_response.size());
  p.append(kSystemMessage).append("\n");
  p.append(kHumanMarker).append(" ").append(instruction).append("\n");
  p.append(kAssistantMarker).append(" ").append(original_response).append("\n");
  p.append(kHumanMarker).append(" ").append(kRewriteRequestTurn).append("\n");
  p.append(kAssistantMarker).append(" ").append(kAcceptanceHead).append(" ");
  if (command) p.append(*command).append(" ");
  p.append(kAcceptanceTail);
  return p;
}

DistortionPrompt BuildLlmDistortionPrompt(const InstructionSample& sample,
                                          Rng& rng, const CommandPool& pool) {
  if (Trim(sample.response).empty()) throw EmptyResponse(sample.id);
  DistortionPrompt out;
  std::optional<std::string_view> command;
  if (rng.Bernoulli(kCommandInsertProbability)) {
    const size_t index = rng.UniformIndex(pool.size());
    out.command_index = static_cast<int>(index);
    command = pool.at(index);
  }
  out.prompt = RenderLlmDistortionPrompt(sample.instruction, sample.response, command);
  return out;
}

std::string ExtractDistortedResponse(std::string_view completion) {
  const size_t quote = completion.find('"');
  return Trim(completion.substr(0, quote));
}

}  // namespace pfkit
