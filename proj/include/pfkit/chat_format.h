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

#ifndef PFKIT_CHAT_FORMAT_H_
#define PFKIT_CHAT_FORMAT_H_

#include <string_view>

namespace pfkit {

// Conversation markup shared by prompt assembly and sequence packing.
inline constexpr std::string_view kSystemMessage =
    "A chat between a curious human and an artificial intelligence "
    "assistant. The assistant gives helpful, detailed, and polite answers to "
    "the user's questions.";
inline constexpr std::string_view kHumanMarker = "### Human:";
inline constexpr std::string_view kAssistantMarker = "### Assistant:";
inline constexpr std::string_view kImageToken = "<image>";

}  // namespace pfkit

#endif  // PFKIT_CHAT_FORMAT_H_
