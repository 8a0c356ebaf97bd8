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

#ifndef PFKIT_EVALUATION_METRICS_H_
#define PFKIT_EVALUATION_METRICS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfkit/filters/scorer.h"
#include "pfkit/json_io.h"

namespace pfkit {

struct EvalSample {
  std::string id;
  std::string instruction;
  std::string ground_truth;
  // model_id -> response.
  std::map<std::string, std::string> responses;
  std::vector<std::string> images;

  bool operator==(const EvalSample&) const = default;
};

Json ToJson(const EvalSample& sample);
// Throws SchemaError, including when no model response is present.
EvalSample EvalSampleFromJson(const Json& json);
std::vector<EvalSample> ReadEvalSamples(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Rouge-L

// Lowercases, splits on whitespace and strips trailing punctuation
// (. , ! ? ; :) from each token; tokens left empty are dropped.
std::vector<std::string> RougeTokens(std::string_view text);

size_t LcsLength(const std::vector<std::string>& a, const std::vector<std::string>& b);

// LCS-based F-measure: P = LCS/|cand|, R = LCS/|ref|,
// F = (1 + b^2) P R / (R + b^2 P). Zero when either side is empty or
// nothing matches.
double RougeLFromTokens(const std::vector<std::string>& candidate,
                        const std::vector<std::string>& reference, double beta = 1.0);
double RougeL(std::string_view candidate, std::string_view reference, double beta = 1.0);

// ---------------------------------------------------------------------------
// Scorer-backed metrics

// Cosine similarity of sentence features, checked to lie in [-1, 1].
double StsSimilarity(const std::string& a, const std::string& b,
                     const ScorerHandle& scorer);

enum class QaVerdict { kMatched, kCorrect, kFailed, kUncertain, kSuccess, kFailure };

std::string_view QaVerdictName(QaVerdict verdict);
QaVerdict ParseQaVerdict(std::string_view name);

struct QaJudgement {
  std::string model_id;
  QaVerdict verdict = QaVerdict::kFailure;
  // Label for premise = model answer, hypothesis = ground truth.
  std::optional<NliLabel> nli_label;
  // Reverse direction, present in bidirectional mode.
  std::optional<NliLabel> reverse_label;

  bool operator==(const QaJudgement&) const = default;
};

Json ToJson(const QaJudgement& judgement);

// Success iff the scorer labels the model-answer statement as entailing the
// ground-truth statement (and, in bidirectional mode, the reverse too).
// One scorer call per judgement, two in bidirectional mode.
QaJudgement NliQaJudge(const std::string& question, const std::string& model_answer,
                       const std::string& ground_truth, const ScorerHandle& scorer,
                       const std::string& model_id = "", bool bidirectional = false);

// ---------------------------------------------------------------------------
// Reward win rates

// (sample_id, model_id) -> reward score.
using RewardTable = std::map<std::pair<std::string, std::string>, double>;

struct WinRateMatrix {
  std::vector<std::string> model_ids;
  // rates[i][j]: percentage of samples where model i beats model j, ties
  // counted half. Diagonal entries are NaN.
  std::vector<std::vector<double>> rates;
  size_t n_samples = 0;

  double Rate(std::string_view a, std::string_view b) const;
  Json ToJson() const;
};

// Models default to the sorted union of the samples' response keys. Throws
// MissingScore when some (sample, model) pair lacks a score, EmptyInput
// for no samples or fewer than two models.
WinRateMatrix ComputeWinRateMatrix(const std::vector<EvalSample>& samples,
                                   const RewardTable& scores,
                                   std::vector<std::string> model_ids = {});

// ---------------------------------------------------------------------------
// Alignment tax

struct TaskScore {
  std::string task_id;
  double p_before = 0.0;
  double p_after = 0.0;
};

struct TaxReport {
  std::string model_before;
  std::string model_after;
  std::vector<TaskScore> tasks;
  double tax = 0.0;
  std::string tuning_label;

  Json ToJson() const;
};

// tax = sum over tasks of (before - after); negative means the tuned model
// improved. Throws TaskMismatch unless both maps have the same task ids.
TaxReport AlignmentTax(const std::map<std::string, double>& before,
                       const std::map<std::string, double>& after,
                       const std::string& model_before = "f_llm",
                       const std::string& model_after = "f_mllm",
                       const std::string& tuning_label = "");

// ---------------------------------------------------------------------------
// Agreement with human rankings

struct HumanRanking {
  std::string sample_id;
  // Best first.
  std::vector<std::string> ranking;
  // Groups of models judged equally preferred.
  std::vector<std::vector<std::string>> ties;
};

// One JSON object per line: {"sample_id", "ranking": [...], "ties": [[...]]}.
// Throws ParseError with the line number on any malformed line.
std::vector<HumanRanking> ReadHumanRankings(const std::filesystem::path& path);
HumanRanking HumanRankingFromJson(const Json& json);

struct AgreementResult {
  size_t pairs = 0;
  size_t agreeing = 0;
  double accuracy = 0.0;

  Json ToJson() const;
};

// Fraction of human-ordered, non-tied pairs whose reward order agrees
// strictly. Throws MissingScore for unscored pairs and EmptyPairSet when
// no non-tied pair exists.
AgreementResult MetaAgreement(const RewardTable& scores,
                              const std::vector<HumanRanking>& human);

}  // namespace pfkit

#endif  // PFKIT_EVALUATION_METRICS_H_
