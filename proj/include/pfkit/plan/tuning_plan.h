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

#ifndef PFKIT_PLAN_TUNING_PLAN_H_
#define PFKIT_PLAN_TUNING_PLAN_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pfkit/json_io.h"

namespace pfkit {

// Corpus ids used in stage data mixes.
inline constexpr std::string_view kPfCorpus = "pf1m";
inline constexpr std::string_view kTextCorpus = "text_instructions";
inline constexpr std::string_view kLlavaCorpus = "llava_instruct";

struct MixEntry {
  std::string corpus_id;
  // Exactly one of the two is set.
  std::optional<double> fraction;
  std::optional<int64_t> count;

  bool operator==(const MixEntry&) const = default;
};

struct StageConfig {
  std::string name;
  // Subset of {"lora", "perceiver", "xattn"}.
  std::set<std::string> tunable_modules;
  std::string tunable_params;
  int64_t num_samples = 0;
  int64_t epochs = 1;
  double learning_rate = 0.0;
  int64_t batch_size = 0;
  int64_t context_length = 0;
  int64_t max_images = 0;
  // Reference wall-clock hours of the original run; informational.
  double training_hours = 0.0;
  std::vector<MixEntry> data_mix;

  bool operator==(const StageConfig&) const = default;
};

struct PlanChecks {
  // Stage 3 learning rate must be stage 1's divided by ten.
  bool lr_ratio = true;
  std::set<int64_t> context_budgets = {196, 1024};

  bool operator==(const PlanChecks&) const = default;
};

struct TrainingPlan {
  std::vector<StageConfig> stages;
  PlanChecks checks;

  // SHA-256 of the compact serialization of stages and checks.
  std::string ConfigHash() const;
  Json ToJson() const;
  // Throws SchemaError, then InvalidOverride if the invariants fail.
  static TrainingPlan FromJson(const Json& json);

  bool operator==(const TrainingPlan&) const = default;
};

// Throws InvalidOverride naming the violated invariant.
void CheckPlan(const TrainingPlan& plan);

// The three-stage plan with the reference defaults, with `overrides`
// applied on top:
//   {"checks": {"lr_ratio": bool, "context_budgets": [int]},
//    "stage1": {<StageConfig field>: value, ...}, "stage2": {...}, ...}
// Unknown stages or fields, wrong types and invariant violations throw
// InvalidOverride.
TrainingPlan EmitUShapedPlan(const Json& overrides = Json::object());

// Applies one dotted override such as "stage3.learning_rate=1e-4" or
// "checks.lr_ratio=false". The value is parsed as JSON, falling back to a
// plain string. Does not re-check invariants.
void ApplyOverride(TrainingPlan& plan, std::string_view assignment);

// Ids for stage 1 (reused by stage 3): a seed-keyed uniform sample of
// round(pf_fraction * |pf|) PF ids without replacement, in input order,
// followed by every text-only and LLaVA id. Throws EmptyCorpus when
// pf_ids is empty.
std::vector<std::string> Stage1Mix(const std::vector<std::string>& pf_ids,
                                   const std::vector<std::string>& text_ids,
                                   const std::vector<std::string>& llava_ids,
                                   uint64_t seed, double pf_fraction = 0.1);

}  // namespace pfkit

#endif  // PFKIT_PLAN_TUNING_PLAN_H_
