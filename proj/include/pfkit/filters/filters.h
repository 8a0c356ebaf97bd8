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

#ifndef PFKIT_FILTERS_FILTERS_H_
#define PFKIT_FILTERS_FILTERS_H_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pfkit/corpus/sample.h"
#include "pfkit/filters/scorer.h"
#include "pfkit/json_io.h"

namespace pfkit {

enum class FilterName { kLength, kChange, kSts, kClipScore, kNli };

std::string_view FilterNameString(FilterName name);
// Throws ParseError.
FilterName ParseFilterName(std::string_view name);

inline constexpr size_t kDefaultMinChars = 20;
inline constexpr size_t kDefaultMaxChars = 2048;
inline constexpr double kDefaultStsThreshold = 0.40;
inline constexpr double kDefaultClipScoreThreshold = 17.0;

// Keeps responses whose code-point count lies in [min_chars, max_chars].
// Throws BadConfig unless min_chars < max_chars.
bool LengthFilter(std::string_view response, size_t min_chars, size_t max_chars);

// Keeps rewrites that differ from the raw annotation after whitespace
// normalization.
bool ChangeFilter(std::string_view raw, std::string_view rewritten);

struct ScoredDecision {
  bool keep = false;
  double score = 0.0;
};

// Keeps when cos(original, rewritten) >= threshold.
ScoredDecision StsFilter(const std::string& original, const std::string& rewritten,
                         const ScorerHandle& scorer,
                         double threshold = kDefaultStsThreshold);

struct ParagraphFilterResult {
  // Paragraphs scoring >= threshold, rejoined with blank lines; absent when
  // none survive (the sample is rejected).
  std::optional<std::string> surviving;
  std::vector<double> paragraph_scores;
  size_t dropped = 0;

  bool keep() const { return surviving.has_value(); }
};

// Scores every blank-line separated paragraph against the image and drops
// those below the threshold.
ParagraphFilterResult ClipScoreParagraphFilter(const std::string& rewritten,
                                               const ImageRef& image,
                                               const ScorerHandle& scorer,
                                               double threshold =
                                                   kDefaultClipScoreThreshold);

// Declarative sentence stating that `answer` answers `question`; the NLI
// filter and the QA judge both compare answers in this form.
std::string AnswerStatement(std::string_view answer, std::string_view question);

struct NliDecision {
  bool keep = false;
  NliLabel label = NliLabel::kNeutral;
};

// Rejects when the rewritten answer (premise) contradicts the original
// answer (hypothesis), both phrased as statements about the question. The
// direction matches the QA judge: model output first, reference second.
NliDecision NliContradictionFilter(const std::string& original_answer,
                                   const std::string& rewritten,
                                   const std::string& question,
                                   const ScorerHandle& scorer);

struct FilterConfig {
  size_t min_chars = kDefaultMinChars;
  size_t max_chars = kDefaultMaxChars;
  double sts_threshold = kDefaultStsThreshold;
  double clipscore_threshold = kDefaultClipScoreThreshold;

  bool enable_length = true;
  bool enable_change = true;
  bool enable_sts = true;
  bool enable_clipscore = true;
  bool enable_nli = true;

  // Category routing of the model-based filters.
  std::set<Category> sts_categories = {Category::kCaptioning};
  std::set<Category> clipscore_categories = {Category::kCaptioning};
  std::set<Category> nli_categories = {Category::kVqaRationale, Category::kVqaPlain};

  // Throws BadConfig.
  void Validate() const;
  Json ToJson() const;
  // Accepts a subset of the ToJson keys; absent keys keep their defaults.
  static FilterConfig FromJson(const Json& json);

  bool RunsSts(Category c) const { return enable_sts && sts_categories.count(c) > 0; }
  bool RunsClipScore(Category c) const {
    return enable_clipscore && clipscore_categories.count(c) > 0;
  }
  bool RunsNli(Category c) const { return enable_nli && nli_categories.count(c) > 0; }
};

struct FilterScorers {
  std::optional<ScorerHandle> sts;
  std::optional<ScorerHandle> clipscore;
  std::optional<ScorerHandle> nli;

  static FilterScorers FromSet(const ScorerSet& set);
};

struct FilterVerdict {
  std::string sample_id;
  bool kept = false;
  std::optional<FilterName> rejected_by;
  // One entry per filter that ran. Keys: "length" (code points), "change"
  // (1 when changed), "sts", "clipscore" (minimum paragraph score) plus
  // "clipscore.p<i>" per paragraph, "nli" (0 entailment, 1 neutral,
  // 2 contradiction).
  std::map<std::string, double> scores;
  std::string surviving_response;

  bool operator==(const FilterVerdict&) const = default;
};

Json ToJson(const FilterVerdict& verdict);
FilterVerdict FilterVerdictFromJson(const Json& json);

struct FilterReport {
  size_t total_in = 0;
  size_t total_kept = 0;
  std::map<std::string, size_t> per_filter_rejections;
  double keep_rate = 0.0;

  void Add(const FilterVerdict& verdict);
  // total_kept + sum(rejections) == total_in.
  bool Consistent() const;
  Json ToJson() const;
};

// Runs the filter chain on one sample: length, change, then the model
// filters routed by category (sts and clipscore for captioning, nli for
// VQA). The first rejection ends the chain. Throws MissingRawAnnotation when
// the change filter needs a raw annotation that is absent, BadConfig when
// an enabled model filter has no scorer and ScorerUnavailable on scorer
// failure.
FilterVerdict FilterSample(const InstructionSample& sample, const FilterScorers& scorers,
                           const FilterConfig& config);

struct FilterPipelineResult {
  std::vector<InstructionSample> kept;
  std::vector<FilterVerdict> verdicts;
  FilterReport report;
};

// Filters a corpus with up to `jobs` worker threads. Verdicts and kept
// samples come out in input order; `verdict_sink`, when set, receives each
// verdict in input order as soon as its predecessors are done. Kept samples
// carry the surviving response. On failure the error of the lowest failing
// index is rethrown.
FilterPipelineResult RunFilterPipeline(
    const std::vector<InstructionSample>& corpus, const FilterScorers& scorers,
    const FilterConfig& config, size_t jobs = 1,
    const std::function<void(const FilterVerdict&)>& verdict_sink = {});

}  // namespace pfkit

#endif  // PFKIT_FILTERS_FILTERS_H_
