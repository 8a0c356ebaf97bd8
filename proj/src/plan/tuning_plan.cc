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

#include "pfkit/plan/tuning_plan.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pfkit/errors.h"
#include "pfkit/hashing.h"
#include "pfkit/random.h"

namespace pfkit {

namespace {

const std::set<std::string>& AllowedModules() {
  static const std::set<std::string> kModules = {"lora", "perceiver", "xattn"};
  return kModules;
}

std::vector<MixEntry> Stage1Defaults() {
  return {{std::string(kPfCorpus), 0.1, std::nullopt},
          {std::string(kTextCorpus), 1.0, std::nullopt},
          {std::string(kLlavaCorpus), 1.0, std::nullopt}};
}

TrainingPlan DefaultPlan() {
  TrainingPlan plan;
  StageConfig s1;
  s1.name = "stage1";
  s1.tunable_modules = {"lora"};
  s1.tunable_params = "0.29B";
  s1.num_samples = 772000;
  s1.epochs = 1;
  s1.learning_rate = 1e-4;
  s1.batch_size = 256;
  s1.context_length = 1024;
  s1.max_images = 10;
  s1.training_hours = 11.8;
  s1.data_mix = Stage1Defaults();

  StageConfig s2;
  s2.name = "stage2";
  s2.tunable_modules = {"perceiver", "xattn"};
  s2.tunable_params = "0.1B";
  s2.num_samples = 1070000;
  s2.epochs = 3;
  s2.learning_rate = 1e-4;
  s2.batch_size = 1024;
  s2.context_length = 196;
  s2.max_images = 3;
  s2.training_hours = 9.5;
  s2.data_mix = {{std::string(kPfCorpus), 1.0, std::nullopt}};

  StageConfig s3 = s1;
  s3.name = "stage3";
  s3.learning_rate = 1e-5;
  s3.training_hours = 11.5;

  plan.stages = {s1, s2, s3};
  return plan;
}

Json MixJson(const MixEntry& entry) {
  Json json;
  json["corpus_id"] = entry.corpus_id;
  if (entry.fraction) json["fraction"] = *entry.fraction;
  if (entry.count) json["count"] = *entry.count;
  return json;
}

Json StageJson(const StageConfig& s) {
  Json json;
  json["name"] = s.name;
  json["tunable_modules"] = Json(std::vector<std::string>(s.tunable_modules.begin(),
                                                          s.tunable_modules.end()));
  json["tunable_params"] = s.tunable_params;
  json["num_samples"] = s.num_samples;
  json["epochs"] = s.epochs;
  json["learning_rate"] = s.learning_rate;
  json["batch_size"] = s.batch_size;
  json["context_length"] = s.context_length;
  json["max_images"] = s.max_images;
  json["training_hours"] = s.training_hours;
  Json mix = Json::array();
  for (const MixEntry& entry : s.data_mix) mix.push_back(MixJson(entry));
  json["data_mix"] = std::move(mix);
  return json;
}

Json ChecksJson(const PlanChecks& checks) {
  Json json;
  json["lr_ratio"] = checks.lr_ratio;
  json["context_budgets"] = Json(std::vector<int64_t>(checks.context_budgets.begin(),
                                                      checks.context_budgets.end()));
  return json;
}

[[noreturn]] void Bad(const std::string& where, const std::string& what) {
  throw InvalidOverride(where + ": " + what);
}

int64_t AsInt(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) Bad(where, "expected an integer");
  return v.get<int64_t>();
}

double AsNumber(const Json& v, const std::string& where) {
  if (!v.is_number()) Bad(where, "expected a number");
  return v.get<double>();
}

MixEntry MixFromJson(const Json& v, const std::string& where) {
  if (!v.is_object()) Bad(where, "expected a mix entry object");
  MixEntry entry;
  auto id = v.find("corpus_id");
  if (id == v.end() || !id->is_string()) Bad(where, "mix entry needs corpus_id");
  entry.corpus_id = id->get<std::string>();
  if (v.contains("fraction")) entry.fraction = AsNumber(v["fraction"], where + ".fraction");
  if (v.contains("count")) entry.count = AsInt(v["count"], where + ".count");
  return entry;
}

void SetStageField(StageConfig& s, const std::string& key, const Json& v) {
  const std::string where = s.name + "." + key;
  if (key == "name") {
    Bad(where, "stage names are fixed");
  } else if (key == "tunable_modules") {
    if (!v.is_array()) Bad(where, "expected an array of module names");
    std::set<std::string> modules;
    for (const Json& m : v) {
      if (!m.is_string()) Bad(where, "expected module names");
      modules.insert(m.get<std::string>());
    }
    s.tunable_modules = std::move(modules);
  } else if (key == "tunable_params") {
    if (!v.is_string()) Bad(where, "expected a string");
    s.tunable_params = v.get<std::string>();
  } else if (key == "num_samples") {
    s.num_samples = AsInt(v, where);
  } else if (key == "epochs") {
    s.epochs = AsInt(v, where);
  } else if (key == "learning_rate") {
    s.learning_rate = AsNumber(v, where);
  } else if (key == "batch_size") {
    s.batch_size = AsInt(v, where);
  } else if (key == "context_length") {
    s.context_length = AsInt(v, where);
  } else if (key == "max_images") {
    s.max_images = AsInt(v, where);
  } else if (key == "training_hours") {
    s.training_hours = AsNumber(v, where);
  } else if (key == "data_mix") {
    if (!v.is_array()) Bad(where, "expected an array");
    std::vector<MixEntry> mix;
    for (size_t i = 0; i < v.size(); ++i) {
      mix.push_back(MixFromJson(v[i], where + "[" + std::to_string(i) + "]"));
    }
    s.data_mix = std::move(mix);
  } else {
    Bad(where, "unknown field");
  }
}

void SetCheckField(PlanChecks& checks, const std::string& key, const Json& v) {
  const std::string where = "checks." + key;
  if (key == "lr_ratio") {
    if (!v.is_boolean()) Bad(where, "expected a boolean");
    checks.lr_ratio = v.get<bool>();
  } else if (key == "context_budgets") {
    if (!v.is_array()) Bad(where, "expected an array of integers");
    std::set<int64_t> budgets;
    for (const Json& b : v) budgets.insert(AsInt(b, where));
    checks.context_budgets = std::move(budgets);
  } else {
    Bad(where, "unknown field");
  }
}

StageConfig* FindStage(TrainingPlan& plan, const std::string& name) {
  for (StageConfig& s : plan.stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void ApplyObject(TrainingPlan& plan, const Json& overrides) {
  if (!overrides.is_object()) Bad("overrides", "expected an object");
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    if (!it->is_object()) Bad(it.key(), "expected an object of fields");
    if (it.key() == "checks") {
      for (auto f = it->begin(); f != it->end(); ++f) {
        SetCheckField(plan.checks, f.key(), *f);
      }
      continue;
    }
    StageConfig* stage = FindStage(plan, it.key());
    if (stage == nullptr) Bad(it.key(), "unknown stage");
    for (auto f = it->begin(); f != it->end(); ++f) SetStageField(*stage, f.key(), *f);
  }
}

}  // namespace

void CheckPlan(const TrainingPlan& plan) {
  if (plan.stages.size() != 3) Bad("stages", "the plan has exactly three stages");
  const char* kNames[] = {"stage1", "stage2", "stage3"};
  for (size_t i = 0; i < 3; ++i) {
    const StageConfig& s = plan.stages[i];
    if (s.name != kNames[i]) Bad("stages", "stage " + std::to_string(i + 1) + " misnamed");
    if (s.epochs < 1) Bad(s.name + ".epochs", "must be >= 1");
    if (!(s.learning_rate > 0.0) || !std::isfinite(s.learning_rate)) {
      Bad(s.name + ".learning_rate", "must be positive");
    }
    if (s.num_samples < 1) Bad(s.name + ".num_samples", "must be positive");
    if (s.batch_size < 1) Bad(s.name + ".batch_size", "must be positive");
    if (s.max_images < 1) Bad(s.name + ".max_images", "must be positive");
    if (plan.checks.context_budgets.count(s.context_length) == 0) {
      Bad(s.name + ".context_length",
          std::to_string(s.context_length) + " is not a declared budget");
    }
    for (const std::string& m : s.tunable_modules) {
      if (AllowedModules().count(m) == 0) Bad(s.name + ".tunable_modules", "unknown " + m);
    }
    for (const MixEntry& e : s.data_mix) {
      const std::string where = s.name + ".data_mix." + e.corpus_id;
      if (e.fraction.has_value() == e.count.has_value()) {
        Bad(where, "set exactly one of fraction and count");
      }
      if (e.fraction && !(*e.fraction > 0.0 && *e.fraction <= 1.0)) {
        Bad(where, "fraction must lie in (0, 1]");
      }
      if (e.count && *e.count < 1) Bad(where, "count must be positive");
    }
  }
  const std::set<std::string> lora = {"lora"};
  const std::set<std::string> connector = {"perceiver", "xattn"};
  if (plan.stages[0].tunable_modules != lora) Bad("stage1.tunable_modules", "must be {lora}");
  if (plan.stages[1].tunable_modules != connector) {
    Bad("stage2.tunable_modules", "must be {perceiver, xattn}");
  }
  if (plan.stages[2].tunable_modules != lora) Bad("stage3.tunable_modules", "must be {lora}");
  if (plan.checks.lr_ratio) {
    const double want = plan.stages[0].learning_rate / 10.0;
    if (std::fabs(plan.stages[2].learning_rate - want) > 1e-9 * want) {
      Bad("stage3.learning_rate", "must be stage1.learning_rate / 10");
    }
  }
}

std::string TrainingPlan::ConfigHash() const {
  Json json;
  Json stage_list = Json::array();
  for (const StageConfig& s : stages) stage_list.push_back(StageJson(s));
  json["stages"] = std::move(stage_list);
  json["checks"] = ChecksJson(checks);
  return Sha256Hex(DumpLine(json));
}

Json TrainingPlan::ToJson() const {
  Json json;
  json["plan"] = "u_shaped";
  Json stage_list = Json::array();
  for (const StageConfig& s : stages) stage_list.push_back(StageJson(s));
  json["stages"] = std::move(stage_list);
  json["checks"] = ChecksJson(checks);
  Json provenance;
  provenance["config_hash"] = ConfigHash();
  json["provenance"] = std::move(provenance);
  return json;
}

TrainingPlan TrainingPlan::FromJson(const Json& json) {
  if (!json.is_object()) throw SchemaError("plan", "expected an object");
  const Json& stages = RequireField(json, "stages");
  if (!stages.is_array()) throw SchemaError("stages", "expected an array");
  TrainingPlan plan;
  for (const Json& sj : stages) {
    if (!sj.is_object()) throw SchemaError("stages", "expected stage objects");
    StageConfig s;
    s.name = RequireString(sj, "name");
    for (auto it = sj.begin(); it != sj.end(); ++it) {
      if (it.key() != "name") SetStageField(s, it.key(), *it);
    }
    plan.stages.push_back(std::move(s));
  }
  auto checks = json.find("checks");
  if (checks != json.end()) {
    if (!checks->is_object()) throw SchemaError("checks", "expected an object");
    for (auto it = checks->begin(); it != checks->end(); ++it) {
      SetCheckField(plan.checks, it.key(), *it);
    }
  }
  CheckPlan(plan);
  return plan;
}

TrainingPlan EmitUShapedPlan(const Json& overrides) {
  TrainingPlan plan = DefaultPlan();
  if (!overrides.is_null()) ApplyObject(plan, overrides);
  CheckPlan(plan);
  return plan;
}

void ApplyOverride(TrainingPlan& plan, std::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    Bad(std::string(assignment), "expected section.field=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  const size_t dot = path.find('.');
  if (dot == std::string::npos) Bad(path, "expected section.field");
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  Json overrides;
  overrides[path.substr(0, dot)][path.substr(dot + 1)] = value;
  ApplyObject(plan, overrides);
}

std::vector<std::string> Stage1Mix(const std::vector<std::string>& pf_ids,
                                   const std::vector<std::string>& text_ids,
                                   const std::vector<std::string>& llava_ids,
                                   uint64_t seed, double pf_fraction) {
  if (pf_ids.empty()) throw EmptyCorpus("stage 1 mix needs a non-empty PF corpus");
  if (!(pf_fraction > 0.0 && pf_fraction <= 1.0)) {
    throw BadConfig("pf_fraction must lie in (0, 1]");
  }
  const size_t k = static_cast<size_t>(
      std::llround(pf_fraction * static_cast<double>(pf_ids.size())));
  std::vector<std::pair<uint64_t, size_t>> ranked;
  ranked.reserve(pf_ids.size());
  for (size_t i = 0; i < pf_ids.size(); ++i) {
    ranked.emplace_back(DeriveSeed(seed, "stage1:" + pf_ids[i]), i);
  }
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : pf_ids[a.second] < pf_ids[b.second];
  });
  std::vector<size_t> picked;
  picked.reserve(k);
  for (size_t i = 0; i < k; ++i) picked.push_back(ranked[i].second);
  std::sort(picked.begin(), picked.end());

  std::vector<std::string> out;
  out.reserve(k + text_ids.size() + llava_ids.size());
  for (size_t i : picked) out.push_back(pf_ids[i]);
  out.insert(out.end(), text_ids.begin(), text_ids.end());
  out.insert(out.end(), llava_ids.begin(), llava_ids.end());
  return out;
}

}  // namespace pfkit
