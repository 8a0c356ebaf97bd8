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

#ifndef PFKIT_DISTORTION_LLM_PROMPT_H_
#define PFKIT_DISTORTION_LLM_PROMPT_H_

#include <optional>
#include <string>
#include <string_view>

#include "pfkit/corpus/sample.h"
#include "pfkit/distortion/command_pool.h"
#include "pfkit/random.h"

namespace pfkit {

inline constexpr double kCommandInsertProbability = 0.5;

inline constexpr std::string_view kRewriteRequestTurn =
    "Your reply's style, tone, and politeness are excellent, and the content "
    "is very detailed. However, now I would like you to summarize the previous "
    "response, keeping only the most crucial information and removing all "
    "other less important content. I want a concise, straightforward reply "
    "without any redundancy. If you find that the overall quality of your "
    "response dropped, don't worry, it's fine. Note that, please do not add "
    "anything after giving me your rewritten response.";

inline constexpr std::string_view kAcceptanceHead =
    "Sure. I have rewritten my last response to a much shorter and more "
    "concise version, covering only the key information. I pretend to be a "
    "cold-hearted, non-talkative, socially inept robotic assistant to respond "
    "to your request.";

inline constexpr std::string_view kAcceptanceTail =
    "The following is the as-short-as-possible, low-quality, "
    "highly-compressed, rewritten version of my previous response, and I will "
    "not add more content after finishing this response: \"";

// Renders the distortion prompt with `command` in the distortion slot, or
// with the slot elided when it is absent.
std::string RenderLlmDistortionPrompt(std::string_view instruction,
                                      std::string_view original_response,
                                      std::optional<std::string_view> command);

struct DistortionPrompt {
  std::string prompt;
  std::optional<int> command_index;
};

// Flips a fair coin; on heads draws one command uniformly from `pool`.
// Throws EmptyResponse when the sample has no response.
DistortionPrompt BuildLlmDistortionPrompt(
    const InstructionSample& sample, Rng& rng,
    const CommandPool& pool = CommandPool::Builtin());

// The LLM continues after the opening quote; keeps the text up to the
// closing quote (if any), trimmed.
std::string ExtractDistortedResponse(std::string_view completion);

}  // namespace pfkit

#endif  // PFKIT_DISTORTION_LLM_PROMPT_H_
