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

#include "pfkit/filters/filters.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "pfkit/errors.h"
#include "pfkit/text_util.h"

namespace pfkit {

std::string_view FilterNameString(FilterName name) {
  switch (name) {
    case FilterName::kLength:
      return "length";
    case FilterName::kChange:
      return "change";
    case FilterName::kSts:
      return "sts";
    case FilterName::kClipScore:
      return "clipscore";
    case FilterName::kNli:
      return "nli";
  }
  return "unknown";
}

FilterName ParseFilterName(std::string_view name) {
  for (FilterName f : {FilterName::kLength, FilterName::kChange, FilterName::kSts,
                       FilterName::kClipScore, FilterName::kNli}) {
    if (FilterNameString(f) == name) return f;
  }
  throw ParseError("unknown filter '" + std::string(name) + "'");
}

bool LengthFilter(std::string_view response, size_t min_chars, size_t max_chars) {
  if (min_chars >= max_chars) {
    throw BadConfig("length filter needs min_chars < max_chars (got " +
                    std::to_string(min_chars) + ", " + std::to_string(max_chars) + ")");
  }
  const size_t n = CountCodePoints(response);
  return n >= min_chars && n <= max_chars;
}

bool ChangeFilter(std::string_view raw, std::string_view rewritten) {
  return CollapseWhitespace(raw) != CollapseWhitespace(rewritten);
}

ScoredDecision StsFilter(const std::string& original, const std::string& rewritten,
                         const ScorerHandle& scorer, double threshold) {
  const double score = scorer.Sts(original, rewritten);
  return {score >= threshold, score};
}

ParagraphFilterResult ClipScoreParagraphFilter(const std::string& rewritten,
                                               const ImageRef& image,
                                               const ScorerHandle& scorer,
                                               double threshold) {
  ParagraphFilterResult result;
  std::vector<std::string> kept;
  for (const std::string& paragraph : SplitParagraphs(rewritten)) {
    const double score = scorer.ClipScore(paragraph, image.uri);
    result.paragraph_scores.push_back(score);
    if (score >= threshold) {
      kept.push_back(paragraph);
    } else {
      ++result.dropped;
    }
  }
  if (!kept.empty()) result.surviving = Join(kept, "\n\n");
  return result;
}

std::string AnswerStatement(std::string_view answer, std::string_view question) {
  std::string out = "\"";
  out += Trim(answer);
  out += "\" is the answer to the question: \"";
  out += Trim(question);
  out += "\"";
  return out;
}

NliDecision NliContradictionFilter(const std::string& original_answer,
                                   const std::string& rewritten,
                                   const std::string& question,
                                   const ScorerHandle& scorer) {
  const NliLabel label = scorer.Nli(AnswerStatement(rewritten, question),
                                    AnswerStatement(original_answer, question));
  return {label != NliLabel::kContradiction, label};
}

// ---------------------------------------------------------------------------
// FilterConfig

namespace {

Json CategoryList(const std::set<Category>& categories) {
  Json out = Json::array();
  for (Category c : categories) out.push_back(std::string(CategoryName(c)));
  return out;
}

std::set<Category> ParseCategoryList(const Json& json, const char* field) {
  if (!json.is_array()) throw SchemaError(field, "expected an array of categories");
  std::set<Category> out;
  for (const Json& item : json) {
    if (!item.is_string()) throw SchemaError(field, "expected category names");
    out.insert(ParseCategory(item.get<std::string>()));
  }
  return out;
}

size_t NonNegative(const Json& json, const char* field) {
  const int64_t value = RequireInt(json, field);
  if (value < 0) throw BadConfig(std::string(field) + " must be >= 0");
  return static_cast<size_t>(value);
}

bool Flag(const Json& json, const char* field, bool fallback) {
  auto it = json.find(field);
  if (it == json.end()) return fallback;
  if (!it->is_boolean()) throw SchemaError(field, "expected a boolean");
  return it->get<bool>();
}

}  // namespace

void FilterConfig::Validate() const {
  if (min_chars >= max_chars) {
    throw BadConfig("min_chars must be below max_chars");
  }
  if (sts_threshold < -1.0 || sts_threshold > 1.0) {
    throw BadConfig("sts_threshold must lie in [-1, 1]");
  }
}

Json FilterConfig::ToJson() const {
  Json json;
  json["min_chars"] = min_chars;
  json["max_chars"] = max_chars;
  json["sts_threshold"] = sts_threshold;
  json["clipscore_threshold"] = clipscore_threshold;
  json["enable_length"] = enable_length;
  json["enable_change"] = enable_change;
  json["enable_sts"] = enable_sts;
  json["enable_clipscore"] = enable_clipscore;
  json["enable_nli"] = enable_nli;
  json["sts_categories"] = CategoryList(sts_categories);
  json["clipscore_categories"] = CategoryList(clipscore_categories);
  json["nli_categories"] = CategoryList(nli_categories);
  return json;
}

FilterConfig FilterConfig::FromJson(const Json& json) {
  if (!json.is_object()) throw BadConfig("filter config must be a JSON object");
  FilterConfig config;
  if (json.contains("min_chars")) config.min_chars = NonNegative(json, "min_chars");
  if (json.contains("max_chars")) config.max_chars = NonNegative(json, "max_chars");
  if (json.contains("sts_threshold")) {
    config.sts_threshold = RequireNumber(json, "sts_threshold");
  }
  if (json.contains("clipscore_threshold")) {
    config.clipscore_threshold = RequireNumber(json, "clipscore_threshold");
  }
  config.enable_length = Flag(json, "enable_length", config.enable_length);
  config.enable_change = Flag(json, "enable_change", config.enable_change);
  config.enable_sts = Flag(json, "enable_sts", config.enable_sts);
  config.enable_clipscore = Flag(json, "enable_clipscore", config.enable_clipscore);
  config.enable_nli = Flag(json, "enable_nli", config.enable_nli);
  if (json.contains("sts_categories")) {
    config.sts_categories = ParseCategoryList(json["sts_categories"], "sts_categories");
  }
  if (json.contains("clipscore_categories")) {
    config.clipscore_categories =
        ParseCategoryList(json["clipscore_categories"], "clipscore_categories");
  }
  if (json.contains("nli_categories")) {
    config.nli_categories = ParseCategoryList(json["nli_categories"], "nli_categories");
  }
  config.Validate();
  return config;
}

FilterScorers FilterScorers::FromSet(const ScorerSet& set) {
  return {set.sts, set.clipscore, set.nli};
}

// ---------------------------------------------------------------------------
// Verdicts and reports

Json ToJson(const FilterVerdict& verdict) {
  Json json;
  json["sample_id"] = verdict.sample_id;
  json["kept"] = verdict.kept;
  json["rejected_by"] = verdict.rejected_by
                            ? Json(std::string(FilterNameString(*verdict.rejected_by)))
                            : Json(nullptr);
  Json scores = Json::object();
  for (const auto& [name, value] : verdict.scores) scores[name] = value;
  json["scores"] = scores;
  json["surviving_response"] = verdict.surviving_response;
  return json;
}

FilterVerdict FilterVerdictFromJson(const Json& json) {
  FilterVerdict verdict;
  verdict.sample_id = RequireString(json, "sample_id");
  const Json& kept = RequireField(json, "kept");
  if (!kept.is_boolean()) throw SchemaError("kept", "expected a boolean");
  verdict.kept = kept.get<bool>();
  auto rejected = json.find("rejected_by");
  if (rejected != json.end() && !rejected->is_null()) {
    if (!rejected->is_string()) throw SchemaError("rejected_by", "expected a string");
    verdict.rejected_by = ParseFilterName(rejected->get<std::string>());
  }
  if (verdict.kept == verdict.rejected_by.has_value()) {
    throw SchemaError("rejected_by", "must be absent exactly when kept");
  }
  const Json& scores = RequireField(json, "scores");
  if (!scores.is_object()) throw SchemaError("scores", "expected an object");
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (!it->is_number()) throw SchemaError("scores", "expected numbers");
    verdict.scores[it.key()] = it->get<double>();
  }
  verdict.surviving_response = RequireString(json, "surviving_response", true);
  return verdict;
}

void FilterReport::Add(const FilterVerdict& verdict) {
  ++total_in;
  if (verdict.kept) {
    ++total_kept;
  } else if (verdict.rejected_by) {
    ++per_filter_rejections[std::string(FilterNameString(*verdict.rejected_by))];
  }
  keep_rate = static_cast<double>(total_kept) / static_cast<double>(total_in);
}

bool FilterReport::Consistent() const {
  size_t rejected = 0;
  for (const auto& [name, count] : per_filter_rejections) rejected += count;
  return total_kept + rejected == total_in;
}

Json FilterReport::ToJson() const {
  Json json;
  json["total_in"] = total_in;
  json["total_kept"] = total_kept;
  Json rejections = Json::object();
  for (FilterName f : {FilterName::kLength, FilterName::kChange, FilterName::kSts,
                       FilterName::kClipScore, FilterName::kNli}) {
    const std::string name(FilterNameString(f));
    auto it = per_filter_rejections.find(name);
    rejections[name] = it == per_filter_rejections.end() ? 0 : it->second;
  }
  json["per_filter_rejections"] = rejections;
  json["keep_rate"] = keep_rate;
  return json;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

const ScorerHandle& Need(const std::optional<ScorerHandle>& handle, FilterName name) {
  if (!handle) {
    throw BadConfig(std::string(FilterNameString(name)) +
                    " filter enabled without a scorer");
  }
  return *handle;
}

FilterVerdict Reject(FilterVerdict verdict, FilterName by) {
  verdict.kept = false;
  verdict.rejected_by = by;
  return verdict;
}

}  // namespace

FilterVerdict FilterSample(const InstructionSample& sample, const FilterScorers& scorers,
                           const FilterConfig& config) {
  FilterVerdict verdict;
  verdict.sample_id = sample.id;
  verdict.surviving_response = sample.response;
  const std::string& response = sample.response;

  if (config.enable_length) {
    verdict.scores["length"] = static_cast<double>(CountCodePoints(response));
    if (!LengthFilter(response, config.min_chars, config.max_chars)) {
      return Reject(std::move(verdict), FilterName::kLength);
    }
  }
  if (config.enable_change) {
    if (!sample.raw_annotation) throw MissingRawAnnotation(sample.id);
    const bool changed = ChangeFilter(*sample.raw_annotation, response);
    verdict.scores["change"] = changed ? 1.0 : 0.0;
    if (!changed) return Reject(std::move(verdict), FilterName::kChange);
  }

  try {
    if (config.RunsSts(sample.category)) {
      if (!sample.raw_annotation) throw MissingRawAnnotation(sample.id);
      const ScoredDecision d = StsFilter(*sample.raw_annotation, response,
                                         Need(scorers.sts, FilterName::kSts),
                                         config.sts_threshold);
      verdict.scores["sts"] = d.score;
      if (!d.keep) return Reject(std::move(verdict), FilterName::kSts);
    }
    if (config.RunsClipScore(sample.category) && !sample.images.empty()) {
      const ParagraphFilterResult r = ClipScoreParagraphFilter(
          response, sample.images.front(), Need(scorers.clipscore, FilterName::kClipScore),
          config.clipscore_threshold);
      if (!r.paragraph_scores.empty()) {
        verdict.scores["clipscore"] =
            *std::min_element(r.paragraph_scores.begin(), r.paragraph_scores.end());
      }
      for (size_t i = 0; i < r.paragraph_scores.size(); ++i) {
        verdict.scores["clipscore.p" + std::to_string(i)] = r.paragraph_scores[i];
      }
      if (!r.keep()) return Reject(std::move(verdict), FilterName::kClipScore);
      verdict.surviving_response = *r.surviving;
    }
    if (config.RunsNli(sample.category)) {
      if (!sample.raw_annotation) throw MissingRawAnnotation(sample.id);
      const NliDecision d = NliContradictionFilter(*sample.raw_annotation, response,
                                                   sample.instruction,
                                                   Need(scorers.nli, FilterName::kNli));
      verdict.scores["nli"] = static_cast<double>(static_cast<int>(d.label));
      if (!d.keep) return Reject(std::move(verdict), FilterName::kNli);
    }
  } catch (const ScorerUnavailable& e) {
    throw ScorerUnavailable("sample " + sample.id + ": " + e.what());
  }

  verdict.kept = true;
  return verdict;
}

FilterPipelineResult RunFilterPipeline(
    const std::vector<InstructionSample>& corpus, const FilterScorers& scorers,
    const FilterConfig& config, size_t jobs,
    const std::function<void(const FilterVerdict&)>& verdict_sink) {
  config.Validate();
  if (config.enable_sts && !scorers.sts) Need(scorers.sts, FilterName::kSts);
  if (config.enable_clipscore && !scorers.clipscore) {
    Need(scorers.clipscore, FilterName::kClipScore);
  }
  if (config.enable_nli && !scorers.nli) Need(scorers.nli, FilterName::kNli);

  const size_t n = corpus.size();
  std::vector<std::optional<FilterVerdict>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  size_t flushed = 0;
  std::exception_ptr sink_error;

  // Hands finished verdicts to the sink in input order.
  auto flush = [&] {
    while (flushed < n && slots[flushed].has_value()) {
      if (verdict_sink && !sink_error) {
        try {
          verdict_sink(*slots[flushed]);
        } catch (...) {
          sink_error = std::current_exception();
          failed = true;
        }
      }
      ++flushed;
    }
  };

  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        FilterVerdict verdict = FilterSample(corpus[i], scorers, config);
        std::lock_guard<std::mutex> lock(mu);
        slots[i] = std::move(verdict);
        flush();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };

  const size_t workers = std::max<size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t t = 0; t < workers; ++t) threads.emplace_back(work);
    for (std::thread& t : threads) t.join();
  }

  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  if (sink_error) std::rethrow_exception(sink_error);

  FilterPipelineResult result;
  result.verdicts.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    FilterVerdict& verdict = *slots[i];
    result.report.Add(verdict);
    if (verdict.kept) {
      InstructionSample kept = corpus[i];
      kept.response = verdict.surviving_response;
      result.kept.push_back(std::move(kept));
    }
    result.verdicts.push_back(std::move(verdict));
  }
  return result;
}

}  // namespace pfkit
