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

#ifndef PFKIT_DISTORTION_TEXT_AUGMENT_H_
#define PFKIT_DISTORTION_TEXT_AUGMENT_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "pfkit/random.h"

namespace pfkit {

enum class CharOp { kInsert, kSubstitute, kSwap, kDelete };
enum class WordOp { kSwap, kCrop, kDelete };
enum class SentenceOp { kDrop, kShuffle };

struct AugmentOptions {
  double level_probability = 0.5;
  // Fraction of non-space characters touched by the character level.
  double char_rate = 0.03;
  // Fraction of words touched by the word level.
  double word_rate = 0.10;
};

struct AugmentResult {
  std::string text;
  // Which level coins came up "apply". A level may fire without changing
  // the text (e.g. sentence level on a single sentence).
  bool char_fired = false;
  bool word_fired = false;
  bool sentence_fired = false;
  std::optional<CharOp> char_op;
  std::optional<WordOp> word_op;
  std::optional<SentenceOp> sentence_op;
};

// Character-, word- and sentence-level noise, each level applied
// independently with `level_probability`. Levels run sentence, word, char.
// A non-empty input never produces an empty output.
AugmentResult RandomTextAugment(std::string_view text, Rng& rng,
                                const AugmentOptions& options = {});

// Applies `op` at the given code-point positions (positions should index
// non-space characters). `rng` supplies inserted/substituted letters.
std::string ApplyCharOp(std::string_view text, CharOp op,
                        std::span<const size_t> positions, Rng& rng);

std::string ApplyWordOp(std::string_view text, WordOp op, double rate, Rng& rng);

// Returns the input unchanged when it holds fewer than two sentences.
std::string ApplySentenceOp(std::string_view text, SentenceOp op, Rng& rng);

}  // namespace pfkit

#endif  // PFKIT_DISTORTION_TEXT_AUGMENT_H_
