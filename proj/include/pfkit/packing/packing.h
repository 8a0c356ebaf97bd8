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

#ifndef PFKIT_PACKING_PACKING_H_
#define PFKIT_PACKING_PACKING_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pfkit/corpus/sample.h"
#include "pfkit/json_io.h"
#include "pfkit/packing/tokenizer.h"
#include "pfkit/random.h"

namespace pfkit {

// Half-open token range [begin, end).
struct TokenSpan {
  size_t begin = 0;
  size_t end = 0;

  size_t size() const { return end - begin; }
  bool operator==(const TokenSpan&) const = default;
};

struct PackedTurn {
  std::string sample_id;
  // System preamble (turn 1 only), human marker, image tokens, instruction
  // and assistant marker.
  TokenSpan instruction_span;
  // Response tokens followed by EOS.
  TokenSpan response_span;

  bool operator==(const PackedTurn&) const = default;
};

struct ImageSlot {
  std::string sample_id;
  std::string uri;

  bool operator==(const ImageSlot&) const = default;
};

struct PackedSequence {
  std::vector<PackedTurn> turns;
  std::vector<TokenId> token_ids;
  std::vector<uint8_t> loss_mask;
  std::vector<ImageSlot> image_slots;
  size_t budget = 0;
  // True when the single turn was cut to fit the budget.
  bool truncated = false;

  bool operator==(const PackedSequence&) const = default;
};

Json ToJson(const PackedSequence& sequence);
PackedSequence PackedSequenceFromJson(const Json& json);

struct PackOptions {
  size_t budget = 1024;
  size_t max_images = 10;
  // Consecutive filler draws that do not fit before a sequence is closed.
  size_t max_misses = 4;
  // false: every sample lands in exactly one sequence. true: every sample
  // seeds one sequence and fillers are drawn from the whole corpus (a
  // sample still appears at most once per sequence).
  bool reuse_fillers = false;
};

struct PackStats {
  size_t sequences = 0;
  size_t turns = 0;
  size_t truncated = 0;
  // Samples with more images than max_images; they cannot be packed.
  size_t skipped_over_image_cap = 0;
  size_t pad_tokens = 0;
  size_t total_tokens = 0;

  Json ToJson() const;
};

// Tokens of one turn, built per turn so marker boundaries are exact.
struct TurnTokens {
  std::vector<TokenId> prefix;
  std::vector<TokenId> response;  // without EOS
  size_t size() const { return prefix.size() + response.size() + 1; }
};

TurnTokens TokenizeTurn(const InstructionSample& sample, bool first_turn,
                        const Tokenizer& tokenizer);

// Packs the corpus into multi-turn sequences of exactly `budget` tokens
// (padded). Seeds are visited in a shuffled order; each sequence greedily
// takes random fillers while tokens and images stay within the limits.
// A seed longer than the budget is emitted alone with its response cut
// from the tail and EOS kept. Throws BudgetTooSmall when some sample's
// turn-1 prefix plus EOS exceeds the budget, and BadConfig on a zero
// budget.
std::vector<PackedSequence> PackMultiturn(const std::vector<InstructionSample>& corpus,
                                          const PackOptions& options,
                                          const Tokenizer& tokenizer, Rng& rng,
                                          PackStats* stats = nullptr);

// Mask recovered from the token stream alone: 1 from the token after each
// assistant marker through the next EOS inclusive, 0 elsewhere. Throws
// MarkerNotFound when non-pad tokens carry no assistant marker or a
// marker has no closing EOS.
std::vector<uint8_t> LossMask(const std::vector<TokenId>& token_ids,
                              const Tokenizer& tokenizer);

// Mask derived from the recorded response spans.
std::vector<uint8_t> SpanMask(const PackedSequence& sequence);

}  // namespace pfkit

#endif  // PFKIT_PACKING_PACKING_H_
