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

#include "pfkit/packing/tokenizer.h"

#include "pfkit/chat_format.h"
#include "pfkit/hashing.h"
#include "pfkit/text_util.h"

namespace pfkit {

TokenId WhitespaceTokenizer::WordId(std::string_view word) {
  constexpr uint64_t kRange = 0x7fffffffULL - kFirstWordId;
  return static_cast<TokenId>(Fnv1a64(word) % kRange) + kFirstWordId;
}

std::vector<TokenId> WhitespaceTokenizer::Encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const std::string& word : SplitWhitespace(text)) ids.push_back(WordId(word));
  return ids;
}

std::vector<TokenId> WhitespaceTokenizer::HumanMarker() const {
  return Encode(kHumanMarker);
}

std::vector<TokenId> WhitespaceTokenizer::AssistantMarker() const {
  return Encode(kAssistantMarker);
}

}  // namespace pfkit
