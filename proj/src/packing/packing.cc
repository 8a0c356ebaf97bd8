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

#include "pfkit/packing/packing.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "pfkit/chat_format.h"
#include "pfkit/errors.h"

namespace pfkit {

TurnTokens TokenizeTurn(const InstructionSample& sample, bool first_turn,
                        const Tokenizer& tokenizer) {
  std::string prefix;
  if (first_turn) {
    prefix.append(kSystemMessage).append("\n");
  } else {
    prefix.append("\n");
  }
  prefix.append(kHumanMarker).append(" ");
  for (size_t i = 0; i < sample.images.size(); ++i) prefix.append(kImageToken);
  prefix.append(sample.instruction).append("\n");
  prefix.append(kAssistantMarker).append(" ");
  return {tokenizer.Encode(prefix), tokenizer.Encode(sample.response)};
}

namespace {

// Unused sample indices with O(1) random removal.
class IndexPool {
 public:
  explicit IndexPool(size_t n) : where_(n, kAbsent) {}

  void Insert(size_t i) {
    where_[i] = items_.size();
    items_.push_back(i);
  }
  void Erase(size_t i) {
    const size_t pos = where_[i];
    if (pos == kAbsent) return;
    const size_t last = items_.back();
    items_[pos] = last;
    where_[last] = pos;
    items_.pop_back();
    where_[i] = kAbsent;
  }
  bool empty() const { return items_.empty(); }
  size_t Draw(Rng& rng) const { return items_[rng.UniformIndex(items_.size())]; }

 private:
  static constexpr size_t kAbsent = static_cast<size_t>(-1);
  std::vector<size_t> where_;
  std::vector<size_t> items_;
};

void AppendTurn(PackedSequence& seq, const InstructionSample& sample,
                const TurnTokens& turn, size_t response_tokens, TokenId eos) {
  PackedTurn packed;
  packed.sample_id = sample.id;
  packed.instruction_span.begin = seq.token_ids.size();
  seq.token_ids.insert(seq.token_ids.end(), turn.prefix.begin(), turn.prefix.end());
  packed.instruction_span.end = seq.token_ids.size();
  packed.response_span.begin = seq.token_ids.size();
  seq.token_ids.insert(seq.token_ids.end(), turn.response.begin(),
                       turn.response.begin() + static_cast<ptrdiff_t>(response_tokens));
  seq.token_ids.push_back(eos);
  packed.response_span.end = seq.token_ids.size();
  seq.turns.push_back(std::move(packed));
  for (const ImageRef& image : sample.images) {
    seq.image_slots.push_back({sample.id, image.uri});
  }
}

void Finish(PackedSequence& seq, TokenId pad, PackStats& stats) {
  stats.pad_tokens += seq.budget - seq.token_ids.size();
  stats.total_tokens += seq.budget;
  stats.turns += seq.turns.size();
  ++stats.sequences;
  if (seq.truncated) ++stats.truncated;
  seq.token_ids.resize(seq.budget, pad);
  seq.loss_mask = SpanMask(seq);
}

}  // namespace

std::vector<PackedSequence> PackMultiturn(const std::vector<InstructionSample>& corpus,
                                          const PackOptions& options,
                                          const Tokenizer& tokenizer, Rng& rng,
                                          PackStats* stats_out) {
  if (options.budget == 0) throw BadConfig("packing budget must be positive");
  const size_t n = corpus.size();
  std::vector<TurnTokens> first(n);
  std::vector<TurnTokens> later(n);
  std::vector<bool> over_cap(n);
  for (size_t i = 0; i < n; ++i) {
    first[i] = TokenizeTurn(corpus[i], true, tokenizer);
    later[i] = TokenizeTurn(corpus[i], false, tokenizer);
    over_cap[i] = corpus[i].images.size() > options.max_images;
    if (first[i].prefix.size() + 1 > options.budget) {
      throw BudgetTooSmall("sample " + corpus[i].id + " needs " +
                           std::to_string(first[i].prefix.size() + 1) +
                           " tokens before its response; budget is " +
                           std::to_string(options.budget));
    }
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  rng.Shuffle(order);

  IndexPool pool(n);
  for (size_t i : order) {
    if (!over_cap[i]) pool.Insert(i);
  }
  std::vector<bool> used(n, false);

  PackStats stats;
  std::vector<PackedSequence> out;
  const TokenId eos = tokenizer.eos();
  for (size_t seed : order) {
    if (over_cap[seed]) {
      ++stats.skipped_over_image_cap;
      continue;
    }
    if (!options.reuse_fillers) {
      if (used[seed]) continue;
      used[seed] = true;
      pool.Erase(seed);
    }

    PackedSequence seq;
    seq.budget = options.budget;
    const TurnTokens& head = first[seed];
    if (head.size() > options.budget) {
      seq.truncated = true;
      AppendTurn(seq, corpus[seed], head, options.budget - head.prefix.size() - 1, eos);
      Finish(seq, tokenizer.pad(), stats);
      out.push_back(std::move(seq));
      continue;
    }
    AppendTurn(seq, corpus[seed], head, head.response.size(), eos);
    size_t tokens = head.size();
    size_t images = corpus[seed].images.size();
    std::set<size_t> members = {seed};
    size_t misses = 0;
    while (misses < options.max_misses && tokens < options.budget) {
      size_t pick;
      if (options.reuse_fillers) {
        pick = rng.UniformIndex(n);
      } else {
        if (pool.empty()) break;
        pick = pool.Draw(rng);
      }
      const TurnTokens& turn = later[pick];
      if (over_cap[pick] || members.count(pick) > 0 ||
          tokens + turn.size() > options.budget ||
          images + corpus[pick].images.size() > options.max_images) {
        ++misses;
        continue;
      }
      misses = 0;
      AppendTurn(seq, corpus[pick], turn, turn.response.size(), eos);
      tokens += turn.size();
      images += corpus[pick].images.size();
      members.insert(pick);
      if (!options.reuse_fillers) {
        used[pick] = true;
        pool.Erase(pick);
      }
    }
    Finish(seq, tokenizer.pad(), stats);
    out.push_back(std::move(seq));
  }
  if (stats_out != nullptr) *stats_out = stats;
  return out;
}

std::vector<uint8_t> SpanMask(const PackedSequence& sequence) {
  std::vector<uint8_t> mask(sequence.token_ids.size(), 0);
  for (const PackedTurn& turn : sequence.turns) {
    for (size_t i = turn.response_span.begin;
         i < turn.response_span.end && i < mask.size(); ++i) {
      mask[i] = 1;
    }
  }
  return mask;
}

std::vector<uint8_t> LossMask(const std::vector<TokenId>& token_ids,
                              const Tokenizer& tokenizer) {
  const std::vector<TokenId> marker = tokenizer.AssistantMarker();
  const TokenId eos = tokenizer.eos();
  const TokenId pad = tokenizer.pad();
  std::vector<uint8_t> mask(token_ids.size(), 0);
  bool inside = false;
  bool any_marker = false;
  bool any_content = false;
  size_t i = 0;
  while (i < token_ids.size()) {
    if (token_ids[i] != pad) any_content = true;
    if (inside) {
      mask[i] = 1;
      if (token_ids[i] == eos) inside = false;
      ++i;
      continue;
    }
    if (!marker.empty() && i + marker.size() <= token_ids.size() &&
        std::equal(marker.begin(), marker.end(),
                   token_ids.begin() + static_cast<ptrdiff_t>(i))) {
      inside = true;
      any_marker = true;
      i += marker.size();
      continue;
    }
    ++i;
  }
  if (inside) throw MarkerNotFound("assistant turn without a closing EOS");
  if (any_content && !any_marker) throw MarkerNotFound("no assistant marker in sequence");
  return mask;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json SpanJson(const TokenSpan& span) { return Json::array({span.begin, span.end}); }

TokenSpan SpanFromJson(const Json& json, const char* field) {
  if (!json.is_array() || json.size() != 2 || !json[0].is_number_unsigned() ||
      !json[1].is_number_unsigned()) {
    throw SchemaError(field, "expected [begin, end]");
  }
  TokenSpan span{json[0].get<size_t>(), json[1].get<size_t>()};
  if (span.begin > span.end) throw SchemaError(field, "begin after end");
  return span;
}

}  // namespace

Json ToJson(const PackedSequence& sequence) {
  Json json;
  Json turns = Json::array();
  for (const PackedTurn& turn : sequence.turns) {
    Json t;
    t["sample_id"] = turn.sample_id;
    t["instruction_span"] = SpanJson(turn.instruction_span);
    t["response_span"] = SpanJson(turn.response_span);
    turns.push_back(std::move(t));
  }
  json["turns"] = std::move(turns);
  json["token_ids"] = sequence.token_ids;
  json["loss_mask"] = sequence.loss_mask;
  Json slots = Json::array();
  for (const ImageSlot& slot : sequence.image_slots) {
    Json s;
    s["sample_id"] = slot.sample_id;
    s["uri"] = slot.uri;
    slots.push_back(std::move(s));
  }
  json["image_slots"] = std::move(slots);
  json["budget"] = sequence.budget;
  json["truncated"] = sequence.truncated;
  return json;
}

PackedSequence PackedSequenceFromJson(const Json& json) {
  PackedSequence seq;
  const Json& turns = RequireField(json, "turns");
  if (!turns.is_array()) throw SchemaError("turns", "expected an array");
  for (const Json& t : turns) {
    PackedTurn turn;
    turn.sample_id = RequireString(t, "sample_id");
    turn.instruction_span = SpanFromJson(RequireField(t, "instruction_span"),
                                         "instruction_span");
    turn.response_span = SpanFromJson(RequireField(t, "response_span"), "response_span");
    seq.turns.push_back(std::move(turn));
  }
  try {
    seq.token_ids = RequireField(json, "token_ids").get<std::vector<TokenId>>();
    seq.loss_mask = RequireField(json, "loss_mask").get<std::vector<uint8_t>>();
  } catch (const nlohmann::json::type_error&) {
    throw SchemaError("token_ids", "expected integer arrays");
  }
  const Json& slots = RequireField(json, "image_slots");
  if (!slots.is_array()) throw SchemaError("image_slots", "expected an array");
  for (const Json& s : slots) {
    seq.image_slots.push_back({RequireString(s, "sample_id"), RequireString(s, "uri")});
  }
  const int64_t budget = RequireInt(json, "budget");
  if (budget <= 0) throw SchemaError("budget", "must be positive");
  seq.budget = static_cast<size_t>(budget);
  auto truncated = json.find("truncated");
  seq.truncated = truncated != json.end() && truncated->is_boolean() &&
                  truncated->get<bool>();
  if (seq.token_ids.size() != seq.loss_mask.size() ||
      seq.token_ids.size() > seq.budget) {
    throw SchemaError("token_ids", "length must match loss_mask and fit the budget");
  }
  return seq;
}

Json PackStats::ToJson() const {
  Json json;
  json["sequences"] = sequences;
  json["turns"] = turns;
  json["truncated"] = truncated;
  json["skipped_over_image_cap"] = skipped_over_image_cap;
  json["pad_tokens"] = pad_tokens;
  json["total_tokens"] = total_tokens;
  return json;
}

}  // namespace pfkit
