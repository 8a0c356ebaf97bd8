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

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "pfkit/chat_format.h"
#include "pfkit/errors.h"
#include "pfkit/packing/packing.h"
#include "pfkit/packing/tokenizer.h"
#include "test_support.h"

namespace pfkit {
namespace {

using testing::CheckPackedSequence;

std::map<std::string, size_t> ImageCounts(const std::vector<InstructionSample>& corpus) {
  std::map<std::string, size_t> counts;
  for (const auto& s : corpus) counts[s.id] = s.images.size();
  return counts;
}

InstructionSample Turn(const std::string& id, const std::string& instruction,
                       const std::string& response, size_t images = 0) {
  InstructionSample s;
  s.id = id;
  s.category = images ? Category::kCaptioning : Category::kTextOnly;
  s.instruction = instruction;
  s.response = response;
  for (size_t i = 0; i < images; ++i) s.images.push_back({id + ".png", 4, 4, {}});
  return s;
}

TEST(Tokenizer, ReservedIdsAndMarkers) {
  WhitespaceTokenizer tok;
  EXPECT_EQ(tok.Encode("a b  c").size(), 3u);
  EXPECT_EQ(tok.HumanMarker().size(), 2u);
  EXPECT_EQ(tok.AssistantMarker().size(), 2u);
  for (TokenId id : tok.Encode("hello world ### Human:")) EXPECT_GE(id, WhitespaceTokenizer::kFirstWordId);
  EXPECT_NE(tok.HumanMarker(), tok.AssistantMarker());
}

TEST(TokenizeTurn, FirstTurnCarriesSystemLine) {
  WhitespaceTokenizer tok;
  const InstructionSample s = Turn("a", "What is it?", "A cat.", 2);
  const TurnTokens first = TokenizeTurn(s, true, tok);
  const TurnTokens later = TokenizeTurn(s, false, tok);
  const std::string expected_first = std::string(kSystemMessage) + "\n" +
                                     std::string(kHumanMarker) + " <image><image>What is it?\n" +
                                     std::string(kAssistantMarker) + " ";
  EXPECT_EQ(first.prefix, tok.Encode(expected_first));
  EXPECT_EQ(later.prefix, tok.Encode("\n" + std::string(kHumanMarker) +
                                     " <image><image>What is it?\n" +
                                     std::string(kAssistantMarker) + " "));
  EXPECT_EQ(first.response, tok.Encode("A cat."));
  EXPECT_EQ(first.size(), first.prefix.size() + 2 + 1);
}

TEST(PackMultiturn, SingleShortCorpusMasksResponsesOnly) {
  WhitespaceTokenizer tok;
  const std::vector<InstructionSample> corpus = {Turn("a", "Q one?", "Answer one."),
                                                 Turn("b", "Q two?", "Answer two here.")};
  PackOptions options;
  options.budget = 120;
  Rng rng(1);
  PackStats stats;
  const auto seqs = PackMultiturn(corpus, options, tok, rng, &stats);
  ASSERT_EQ(seqs.size(), 1u);
  EXPECT_EQ(seqs[0].turns.size(), 2u);
  EXPECT_EQ(CheckPackedSequence(seqs[0], options, tok, ImageCounts(corpus)), "");
  size_t ones = 0;
  for (uint8_t m : seqs[0].loss_mask) ones += m;
  EXPECT_EQ(ones, 2u + 1u + 3u + 1u);  // response words plus EOS per turn
  EXPECT_EQ(stats.turns, 2u);
  EXPECT_EQ(stats.sequences, 1u);
}

TEST(PackMultiturn, EverySampleOnceWithoutReuse) {
  WhitespaceTokenizer tok;
  Rng data(5);
  const auto corpus = testing::FuzzPackCorpus(data, 200, 196, 3);
  PackOptions options;
  options.budget = 196;
  options.max_images = 3;
  Rng rng(2);
  PackStats stats;
  const auto seqs = PackMultiturn(corpus, options, tok, rng, &stats);
  std::multiset<std::string> seen;
  for (const auto& s : seqs) {
    EXPECT_EQ(CheckPackedSequence(s, options, tok, ImageCounts(corpus)), "");
    for (const auto& t : s.turns) seen.insert(t.sample_id);
  }
  size_t over_cap = 0;
  for (const auto& s : corpus) {
    if (s.images.size() > options.max_images) {
      ++over_cap;
      EXPECT_EQ(seen.count(s.id), 0u);
    } else {
      EXPECT_EQ(seen.count(s.id), 1u) << s.id;
    }
  }
  EXPECT_EQ(stats.skipped_over_image_cap, over_cap);
}

TEST(PackMultiturn, ReuseFillersSeedsOneSequencePerSample) {
  WhitespaceTokenizer tok;
  Rng data(8);
  auto corpus = testing::FuzzPackCorpus(data, 50, 1024, 2);
  PackOptions options;
  options.reuse_fillers = true;
  Rng rng(3);
  PackStats stats;
  const auto seqs = PackMultiturn(corpus, options, tok, rng, &stats);
  EXPECT_EQ(seqs.size(), corpus.size() - stats.skipped_over_image_cap);
  for (const auto& s : seqs) EXPECT_EQ(CheckPackedSequence(s, options, tok, ImageCounts(corpus)), "");
}

TEST(PackMultiturn, OversizeSeedTruncatedKeepingEos) {
  WhitespaceTokenizer tok;
  std::string long_response;
  for (int i = 0; i < 300; ++i) long_response += "word" + std::to_string(i) + " ";
  const std::vector<InstructionSample> corpus = {Turn("big", "Tell me.", long_response)};
  PackOptions options;
  options.budget = 196;
  Rng rng(1);
  const auto seqs = PackMultiturn(corpus, options, tok, rng);
  ASSERT_EQ(seqs.size(), 1u);
  EXPECT_TRUE(seqs[0].truncated);
  EXPECT_EQ(seqs[0].token_ids.back(), tok.eos());
  EXPECT_EQ(CheckPackedSequence(seqs[0], options, tok, ImageCounts(corpus)), "");
}

TEST(PackMultiturn, BudgetTooSmallAndZeroBudget) {
  WhitespaceTokenizer tok;
  const std::vector<InstructionSample> corpus = {Turn("a", "Q?", "A.")};
  PackOptions options;
  options.budget = 10;  // the system line alone is longer
  Rng rng(1);
  EXPECT_THROW(PackMultiturn(corpus, options, tok, rng), BudgetTooSmall);
  options.budget = 0;
  EXPECT_THROW(PackMultiturn(corpus, options, tok, rng), BadConfig);
}

TEST(PackMultiturn, DeterministicPerSeed) {
  WhitespaceTokenizer tok;
  Rng data(4);
  const auto corpus = testing::FuzzPackCorpus(data, 100, 1024, 10);
  PackOptions options;
  Rng a(9), b(9), c(10);
  const auto x = PackMultiturn(corpus, options, tok, a);
  EXPECT_EQ(x, PackMultiturn(corpus, options, tok, b));
  EXPECT_NE(x, PackMultiturn(corpus, options, tok, c));
}

TEST(LossMask, MarkerErrors) {
  WhitespaceTokenizer tok;
  std::vector<TokenId> ids = tok.Encode("hello there");
  EXPECT_THROW(LossMask(ids, tok), MarkerNotFound);
  ids = tok.Encode("### Human: hi ### Assistant: never ends");
  EXPECT_THROW(LossMask(ids, tok), MarkerNotFound);
  ids.push_back(tok.eos());
  ids.push_back(tok.pad());
  const auto mask = LossMask(ids, tok);
  EXPECT_EQ(mask, (std::vector<uint8_t>{0, 0, 0, 0, 0, 1, 1, 1, 0}));
  EXPECT_EQ(LossMask({tok.pad(), tok.pad()}, tok), (std::vector<uint8_t>{0, 0}));
}

TEST(PackedSequence, JsonRoundTrip) {
  WhitespaceTokenizer tok;
  const std::vector<InstructionSample> corpus = {Turn("a", "Q?", "Answer.", 1)};
  PackOptions options;
  options.budget = 80;
  Rng rng(1);
  const auto seqs = PackMultiturn(corpus, options, tok, rng);
  EXPECT_EQ(PackedSequenceFromJson(ToJson(seqs[0])), seqs[0]);
  EXPECT_EQ(SpanMask(seqs[0]), seqs[0].loss_mask);
}

}  // namespace
}  // namespace pfkit
