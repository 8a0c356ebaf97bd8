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

#include "pfkit/distortion/text_augment.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pfkit/text_util.h"

namespace pfkit {
namespace {

size_t TouchCount(size_t n, double rate) {
  return std::max<size_t>(1, static_cast<size_t>(std::lround(rate * n)));
}

char32_t RandomLetter(Rng& rng, bool upper) {
  const char32_t base = upper ? U'A' : U'a';
  return base + static_cast<char32_t>(rng.UniformIndex(26));
}

bool IsUpperAscii(char32_t c) { return c >= U'A' && c <= U'Z'; }

// Removes segment `index`, handing its trailing whitespace to the previous
// segment when it was the last one so the text keeps its ending.
void EraseSegment(std::vector<Segment>& segments, size_t index) {
  if (index + 1 == segments.size() && index > 0) {
    segments[index - 1].trailing = segments[index].trailing;
  }
  segments.erase(segments.begin() + static_cast<std::ptrdiff_t>(index));
}

std::string ApplyCharLevel(std::string_view text, Rng& rng, double rate,
                           CharOp* op_out) {
  const std::u32string cps = DecodeUtf8(text);
  std::vector<size_t> candidates;
  for (size_t i = 0; i < cps.size(); ++i) {
    if (!IsSpace(cps[i])) candidates.push_back(i);
  }
  const CharOp op = static_cast<CharOp>(rng.UniformIndex(4));
  *op_out = op;
  if (candidates.empty()) return std::string(text);
  const size_t k = std::min(TouchCount(candidates.size(), rate), candidates.size());
  std::vector<size_t> picks;
  for (size_t idx : rng.SampleWithoutReplacement(candidates.size(), k)) {
    picks.push_back(candidates[idx]);
  }
  std::sort(picks.begin(), picks.end());
  return ApplyCharOp(text, op, picks, rng);
}

}  // namespace

std::string ApplyCharOp(std::string_view text, CharOp op,
                        std::span<const size_t> positions, Rng& rng) {
  std::u32string cps = DecodeUtf8(text);
  std::vector<size_t> pos(positions.begin(), positions.end());
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  std::erase_if(pos, [&](size_t p) { return p >= cps.size(); });
  switch (op) {
    case CharOp::kInsert:
      for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
        cps.insert(cps.begin() + static_cast<std::ptrdiff_t>(*it),
                   RandomLetter(rng, IsUpperAscii(cps[*it])));
      }
      break;
    case CharOp::kSubstitute:
      for (size_t p : pos) {
        const char32_t original = cps[p];
        char32_t replacement;
        do {
          replacement = RandomLetter(rng, IsUpperAscii(original));
        } while (replacement == original);
        cps[p] = replacement;
      }
      break;
    case CharOp::kSwap:
      for (size_t p : pos) {
        if (p + 1 < cps.size() && !IsSpace(cps[p + 1])) {
          std::swap(cps[p], cps[p + 1]);
        } else if (p > 0 && !IsSpace(cps[p - 1])) {
          std::swap(cps[p], cps[p - 1]);
        }
      }
      break;
    case CharOp::kDelete: {
      size_t non_space = 0;
      for (char32_t c : cps) non_space += IsSpace(c) ? 0 : 1;
      // Keep at least one visible character.
      while (!pos.empty() && pos.size() >= non_space) pos.pop_back();
      for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
        cps.erase(cps.begin() + static_cast<std::ptrdiff_t>(*it));
      }
      break;
    }
  }
  return EncodeUtf8(cps);
}

std::string ApplyWordOp(std::string_view text, WordOp op, double rate, Rng& rng) {
  std::string leading;
  std::vector<Segment> words = SplitWords(text, &leading);
  const size_t n = words.size();
  if (n < 2) return std::string(text);
  const size_t k = std::min(TouchCount(n, rate), n - 1);
  switch (op) {
    case WordOp::kSwap:
      for (size_t i = 0; i < k; ++i) {
        const size_t a = rng.UniformIndex(n - 1);
        std::swap(words[a].text, words[a + 1].text);
      }
      break;
    case WordOp::kCrop: {
      const size_t start = rng.UniformIndex(n - k + 1);
      for (size_t i = 0; i < k; ++i) EraseSegment(words, start);
      break;
    }
    case WordOp::kDelete: {
      std::vector<size_t> picks = rng.SampleWithoutReplacement(n, k);
      std::sort(picks.rbegin(), picks.rend());
      for (size_t p : picks) EraseSegment(words, p);
      break;
    }
  }
  return JoinSegments(words, leading);
}

std::string ApplySentenceOp(std::string_view text, SentenceOp op, Rng& rng) {
  std::vector<Segment> sentences = SplitSentences(text);
  if (sentences.size() < 2) return std::string(text);
  switch (op) {
    case SentenceOp::kDrop:
      EraseSegment(sentences, rng.UniformIndex(sentences.size()));
      break;
    case SentenceOp::kShuffle: {
      std::vector<std::string> texts;
      for (auto& s : sentences) texts.push_back(std::move(s.text));
      rng.Shuffle(texts);
      for (size_t i = 0; i < sentences.size(); ++i) {
        sentences[i].text = std::move(texts[i]);
      }
      break;
    }
  }
  return JoinSegments(sentences);
}

AugmentResult RandomTextAugment(std::string_view text, Rng& rng,
                                const AugmentOptions& options) {
  AugmentResult result;
  result.char_fired = rng.Bernoulli(options.level_probability);
  result.word_fired = rng.Bernoulli(options.level_probability);
  result.sentence_fired = rng.Bernoulli(options.level_probability);
  std::string current(text);
  if (result.sentence_fired) {
    const auto op = static_cast<SentenceOp>(rng.UniformIndex(2));
    result.sentence_op = op;
    current = ApplySentenceOp(current, op, rng);
  }
  if (result.word_fired) {
    const auto op = static_cast<WordOp>(rng.UniformIndex(3));
    result.word_op = op;
    current = ApplyWordOp(current, op, options.word_rate, rng);
  }
  if (result.char_fired) {
    CharOp op;
    current = ApplyCharLevel(current, rng, options.char_rate, &op);
    result.char_op = op;
  }
  result.text = std::move(current);
  return result;
}

}  // namespace pfkit
