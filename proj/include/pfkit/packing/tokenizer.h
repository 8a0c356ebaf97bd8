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

#ifndef PFKIT_PACKING_TOKENIZER_H_
#define PFKIT_PACKING_TOKENIZER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pfkit {

using TokenId = int32_t;

// What packing needs from a tokenizer. Encode must be deterministic and the
// marker sequences must appear verbatim in the encoding of any text that
// contains the marker strings.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::string id() const = 0;
  virtual std::vector<TokenId> Encode(std::string_view text) const = 0;
  virtual std::vector<TokenId> HumanMarker() const = 0;
  virtual std::vector<TokenId> AssistantMarker() const = 0;
  virtual TokenId eos() const = 0;
  virtual TokenId pad() const = 0;
};

// Test tokenizer: one token per whitespace-separated word, ids from a
// 64-bit FNV-1a hash folded above the reserved range. PAD is 0 and EOS
// is 1; no word maps to a reserved id.
class WhitespaceTokenizer : public Tokenizer {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kFirstWordId = 16;

  std::string id() const override { return "whitespace-fnv1a-v1"; }
  std::vector<TokenId> Encode(std::string_view text) const override;
  std::vector<TokenId> HumanMarker() const override;
  std::vector<TokenId> AssistantMarker() const override;
  TokenId eos() const override { return kEos; }
  TokenId pad() const override { return kPad; }

  static TokenId WordId(std::string_view word);
};

}  // namespace pfkit

#endif  // PFKIT_PACKING_TOKENIZER_H_
