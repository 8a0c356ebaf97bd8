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

#include "pfkit/evaluation/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pfkit/errors.h"
#include "pfkit/filters/filters.h"
#include "pfkit/text_util.h"

namespace pfkit {

Json ToJson(const EvalSample& sample) {
  Json json;
  json["id"] = sample.id;
  json["instruction"] = sample.instruction;
  json["ground_truth"] = sample.ground_truth;
  Json responses = Json::object();
  for (const auto& [model, text] : sample.responses) responses[model] = text;
  json["responses"] = std::move(responses);
  json["images"] = sample.images;
  return json;
}

EvalSample EvalSampleFromJson(const Json& json) {
  if (!json.is_object()) throw SchemaError("sample", "expected an object");
  EvalSample sample;
  sample.id = RequireString(json, "id");
  sample.instruction = RequireString(json, "instruction");
  sample.ground_truth = RequireString(json, "ground_truth", true);
  const Json& responses = RequireField(json, "responses");
  if (!responses.is_object()) throw SchemaError("responses", "expected an object");
  for (auto it = responses.begin(); it != responses.end(); ++it) {
    if (!it->is_string()) throw SchemaError("responses", "expected strings");
    sample.responses[it.key()] = it->get<std::string>();
  }
  if (sample.responses.empty()) throw SchemaError("responses", "no model response");
  auto images = json.find("images");
  if (images != json.end() && !images->is_null()) {
    if (!images->is_array()) throw SchemaError("images", "expected an array");
    for (const Json& uri : *images) {
      if (!uri.is_string()) throw SchemaError("images", "expected strings");
      sample.images.push_back(uri.get<std::string>());
    }
  }
  return sample;
}

std::vector<EvalSample> ReadEvalSamples(const std::filesystem::path& path) {
  std::vector<EvalSample> samples;
  ForEachLine(path, [&](size_t line, std::string_view text) {
    try {
      samples.push_back(EvalSampleFromJson(ParseJson(text, "eval sample")));
    } catch (const ValidationError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
  return samples;
}

// ---------------------------------------------------------------------------
// Rouge-L

std::vector<std::string> RougeTokens(std::string_view text) {
  std::vector<std::string> tokens;
  for (std::string token : SplitWhitespace(AsciiLower(text))) {
    while (!token.empty() && std::string_view(".,!?;:").find(token.back()) !=
                                 std::string_view::npos) {
      token.pop_back();
    }
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  return tokens;
}

size_t LcsLength(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0);
  std::vector<size_t> cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double RougeLFromTokens(const std::vector<std::string>& candidate,
                        const std::vector<std::string>& reference, double beta) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const size_t lcs = LcsLength(candidate, reference);
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / static_cast<double>(candidate.size());
  const double r = static_cast<double>(lcs) / static_cast<double>(reference.size());
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

double RougeL(std::string_view candidate, std::string_view reference, double beta) {
  return RougeLFromTokens(RougeTokens(candidate), RougeTokens(reference), beta);
}

// ---------------------------------------------------------------------------
// Scorer-backed metrics

double StsSimilarity(const std::string& a, const std::string& b,
                     const ScorerHandle& scorer) {
  return scorer.Sts(a, b);
}

std::string_view QaVerdictName(QaVerdict verdict) {
  switch (verdict) {
    case QaVerdict::kMatched:
      return "matched";
    case QaVerdict::kCorrect:
      return "correct";
    case QaVerdict::kFailed:
      return "failed";
    case QaVerdict::kUncertain:
      return "uncertain";
    case QaVerdict::kSuccess:
      return "success";
    case QaVerdict::kFailure:
      return "failure";
  }
  return "unknown";
}

QaVerdict ParseQaVerdict(std::string_view name) {
  for (QaVerdict v : {QaVerdict::kMatched, QaVerdict::kCorrect, QaVerdict::kFailed,
                      QaVerdict::kUncertain, QaVerdict::kSuccess, QaVerdict::kFailure}) {
    if (QaVerdictName(v) == name) return v;
  }
  throw ParseError("unknown QA verdict '" + std::string(name) + "'");
}

Json ToJson(const QaJudgement& judgement) {
  Json json;
  json["model_id"] = judgement.model_id;
  json["verdict"] = std::string(QaVerdictName(judgement.verdict));
  json["nli_label"] = judgement.nli_label
                          ? Json(std::string(NliLabelName(*judgement.nli_label)))
                          : Json(nullptr);
  if (judgement.reverse_label) {
    json["reverse_label"] = std::string(NliLabelName(*judgement.reverse_label));
  }
  return json;
}

QaJudgement NliQaJudge(const std::string& question, const std::string& model_answer,
                       const std::string& ground_truth, const ScorerHandle& scorer,
                       const std::string& model_id, bool bidirectional) {
  const std::string premise = AnswerStatement(model_answer, question);
  const std::string hypothesis = AnswerStatement(ground_truth, question);
  QaJudgement judgement;
  judgement.model_id = model_id;
  judgement.nli_label = scorer.Nli(premise, hypothesis);
  bool success = *judgement.nli_label == NliLabel::kEntailment;
  if (bidirectional) {
    judgement.reverse_label = scorer.Nli(hypothesis, premise);
    success = success && *judgement.reverse_label == NliLabel::kEntailment;
  }
  judgement.verdict = success ? QaVerdict::kSuccess : QaVerdict::kFailure;
  return judgement;
}

// ---------------------------------------------------------------------------
// Win rates

double WinRateMatrix::Rate(std::string_view a, std::string_view b) const {
  auto index = [&](std::string_view id) {
    auto it = std::find(model_ids.begin(), model_ids.end(), id);
    if (it == model_ids.end()) throw BadConfig("unknown model '" + std::string(id) + "'");
    return static_cast<size_t>(it - model_ids.begin());
  };
  return rates[index(a)][index(b)];
}

Json WinRateMatrix::ToJson() const {
  Json json;
  json["model_ids"] = model_ids;
  Json rows = Json::array();
  for (const auto& row : rates) {
    Json r = Json::array();
    for (double v : row) r.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    rows.push_back(std::move(r));
  }
  json["rates"] = std::move(rows);
  json["n_samples"] = n_samples;
  return json;
}

WinRateMatrix ComputeWinRateMatrix(const std::vector<EvalSample>& samples,
                                   const RewardTable& scores,
                                   std::vector<std::string> model_ids) {
  if (samples.empty()) throw EmptyInput("win-rate matrix needs samples");
  if (model_ids.empty()) {
    std::set<std::string> all;
    for (const EvalSample& s : samples) {
      for (const auto& [model, text] : s.responses) all.insert(model);
    }
    model_ids.assign(all.begin(), all.end());
  }
  const size_t m = model_ids.size();
  if (m < 2) throw EmptyInput("win-rate matrix needs at least two models");

  // wins2[i][j] counts twice the wins plus the ties, keeping integers.
  std::vector<std::vector<size_t>> wins2(m, std::vector<size_t>(m, 0));
  std::vector<double> row(m);
  for (const EvalSample& s : samples) {
    for (size_t i = 0; i < m; ++i) {
      auto it = scores.find({s.id, model_ids[i]});
      if (it == scores.end()) {
        throw MissingScore("no reward for sample " + s.id + ", model " + model_ids[i]);
      }
      row[i] = it->second;
    }
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j < m; ++j) {
        if (i == j) continue;
        if (row[i] > row[j]) {
          wins2[i][j] += 2;
        } else if (row[i] == row[j]) {
          wins2[i][j] += 1;
        }
      }
    }
  }
  WinRateMatrix matrix;
  matrix.model_ids = model_ids;
  matrix.n_samples = samples.size();
  matrix.rates.assign(m, std::vector<double>(m, std::numeric_limits<double>::quiet_NaN()));
  const double denom = 2.0 * static_cast<double>(samples.size());
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) {
      if (i != j) matrix.rates[i][j] = 100.0 * static_cast<double>(wins2[i][j]) / denom;
    }
  }
  return matrix;
}

// ---------------------------------------------------------------------------
// Alignment tax

Json TaxReport::ToJson() const {
  Json json;
  json["model_before"] = model_before;
  json["model_after"] = model_after;
  Json list = Json::array();
  for (const TaskScore& t : tasks) {
    Json j;
    j["task_id"] = t.task_id;
    j["p_before"] = t.p_before;
    j["p_after"] = t.p_after;
    list.push_back(std::move(j));
  }
  json["tasks"] = std::move(list);
  json["tax"] = tax;
  json["tuning_label"] = tuning_label;
  return json;
}

TaxReport AlignmentTax(const std::map<std::string, double>& before,
                       const std::map<std::string, double>& after,
                       const std::string& model_before, const std::string& model_after,
                       const std::string& tuning_label) {
  for (const auto& [task, p] : before) {
    if (after.count(task) == 0) throw TaskMismatch("task " + task + " missing after");
  }
  for (const auto& [task, p] : after) {
    if (before.count(task) == 0) throw TaskMismatch("task " + task + " missing before");
  }
  TaxReport report;
  report.model_before = model_before;
  report.model_after = model_after;
  report.tuning_label = tuning_label;
  for (const auto& [task, p] : before) {
    const double q = after.at(task);
    report.tasks.push_back({task, p, q});
    report.tax += p - q;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Meta agreement

HumanRanking HumanRankingFromJson(const Json& json) {
  if (!json.is_object()) throw ParseError("expected an object");
  HumanRanking h;
  auto id = json.find("sample_id");
  if (id == json.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw ParseError("missing sample_id");
  }
  h.sample_id = id->get<std::string>();
  auto ranking = json.find("ranking");
  if (ranking == json.end() || !ranking->is_array()) throw ParseError("missing ranking");
  std::set<std::string> seen;
  for (const Json& m : *ranking) {
    if (!m.is_string()) throw ParseError("ranking entries must be strings");
    if (!seen.insert(m.get<std::string>()).second) {
      throw ParseError("model listed twice in ranking");
    }
    h.ranking.push_back(m.get<std::string>());
  }
  auto ties = json.find("ties");
  if (ties != json.end() && !ties->is_null()) {
    if (!ties->is_array()) throw ParseError("ties must be an array of groups");
    for (const Json& group : *ties) {
      if (!group.is_array()) throw ParseError("ties must be an array of groups");
      std::vector<std::string> g;
      for (const Json& m : group) {
        if (!m.is_string()) throw ParseError("tie entries must be strings");
        if (seen.count(m.get<std::string>()) == 0) {
          throw ParseError("tied model '" + m.get<std::string>() + "' not in ranking");
        }
        g.push_back(m.get<std::string>());
      }
      h.ties.push_back(std::move(g));
    }
  }
  return h;
}

std::vector<HumanRanking> ReadHumanRankings(const std::filesystem::path& path) {
  std::vector<HumanRanking> out;
  ForEachLine(path, [&](size_t line, std::string_view text) {
    const std::string where = path.string() + ":" + std::to_string(line) + ": ";
    Json json = Json::parse(text, nullptr, false);
    if (json.is_discarded()) throw ParseError(where + "not JSON");
    try {
      out.push_back(HumanRankingFromJson(json));
    } catch (const ParseError& e) {
      throw ParseError(where + e.what());
    }
  });
  return out;
}

Json AgreementResult::ToJson() const {
  Json json;
  json["pairs"] = pairs;
  json["agreeing"] = agreeing;
  json["accuracy"] = accuracy;
  return json;
}

AgreementResult MetaAgreement(const RewardTable& scores,
                              const std::vector<HumanRanking>& human) {
  AgreementResult result;
  for (const HumanRanking& h : human) {
    auto tied = [&](const std::string& a, const std::string& b) {
      for (const auto& group : h.ties) {
        const bool has_a = std::find(group.begin(), group.end(), a) != group.end();
        const bool has_b = std::find(group.begin(), group.end(), b) != group.end();
        if (has_a && has_b) return true;
      }
      return false;
    };
    auto score = [&](const std::string& model) {
      auto it = scores.find({h.sample_id, model});
      if (it == scores.end()) {
        throw MissingScore("no reward for sample " + h.sample_id + ", model " + model);
      }
      return it->second;
    };
    for (size_t i = 0; i < h.ranking.size(); ++i) {
      for (size_t j = i + 1; j < h.ranking.size(); ++j) {
        if (tied(h.ranking[i], h.ranking[j])) continue;
        ++result.pairs;
        if (score(h.ranking[i]) > score(h.ranking[j])) ++result.agreeing;
      }
    }
  }
  if (result.pairs == 0) throw EmptyPairSet("no human-ordered pair without a tie");
  result.accuracy = static_cast<double>(result.agreeing) / static_cast<double>(result.pairs);
  return result;
}

}  // namespace pfkit
