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

// Python extension. Structured values cross the boundary as JSON text; the
// pure-Python wrapper in pfkit/__init__.py converts them to dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pfkit/corpus/sample.h"
#include "pfkit/distortion/caption_bbox.h"
#include "pfkit/distortion/command_pool.h"
#include "pfkit/distortion/llm_prompt.h"
#include "pfkit/distortion/text_augment.h"
#include "pfkit/errors.h"
#include "pfkit/evaluation/metrics.h"
#include "pfkit/filters/filters.h"
#include "pfkit/filters/scorer.h"
#include "pfkit/gateway/batch_rewrite.h"
#include "pfkit/gateway/rewrite_prompt.h"
#include "pfkit/json_io.h"
#include "pfkit/packing/packing.h"
#include "pfkit/packing/tokenizer.h"
#include "pfkit/plan/tuning_plan.h"
#include "pfkit/random.h"

namespace py = pybind11;

namespace pfkit {
namespace {

std::vector<InstructionSample> Samples(const std::vector<std::string>& rows) {
  std::vector<InstructionSample> out;
  out.reserve(rows.size());
  for (const std::string& row : rows) out.push_back(SampleFromJson(ParseJson(row, "sample")));
  return out;
}

RewardTable Rewards(const std::vector<std::tuple<std::string, std::string, double>>& rows) {
  RewardTable table;
  for (const auto& [sample_id, model, score] : rows) table[{sample_id, model}] = score;
  return table;
}

std::tuple<std::string, std::optional<int>> BuildPrompt(const std::string& sample,
                                                        uint64_t seed) {
  Rng rng(seed);
  DistortionPrompt p = BuildLlmDistortionPrompt(SampleFromJson(ParseJson(sample, "sample")), rng);
  return {std::move(p.prompt), p.command_index};
}

std::tuple<std::string, bool, bool, bool> Augment(const std::string& text, uint64_t seed) {
  Rng rng(seed);
  AugmentResult r = RandomTextAugment(text, rng);
  return {std::move(r.text), r.char_fired, r.word_fired, r.sentence_fired};
}

std::string CaptionBbox(
    const std::vector<std::string>& captions,
    const std::vector<std::tuple<std::string, double, double, double, double>>& boxes, int width,
    int height) {
  std::vector<LabeledBox> labeled;
  for (const auto& [category, x1, y1, x2, y2] : boxes) {
    labeled.push_back({category, x1, y1, x2, y2});
  }
  return CaptionBboxDistortion(captions, labeled, width, height);
}

std::tuple<std::vector<std::string>, std::vector<std::string>, std::string> FilterCorpus(
    const std::vector<std::string>& corpus, const std::string& table, const std::string& config,
    size_t jobs) {
  const FilterConfig cfg =
      config.empty() ? FilterConfig{} : FilterConfig::FromJson(ParseJson(config, "config"));
  const FilterScorers scorers = FilterScorers::FromSet(
      ScorerSet::FromBackend(StubScorer::FromJson(ParseJson(table, "scorer table"))));
  FilterPipelineResult r;
  {
    py::gil_scoped_release release;
    r = RunFilterPipeline(Samples(corpus), scorers, cfg, jobs);
  }
  std::vector<std::string> kept;
  for (const InstructionSample& s : r.kept) kept.push_back(ToJson(s).dump());
  std::vector<std::string> verdicts;
  for (const FilterVerdict& v : r.verdicts) verdicts.push_back(ToJson(v).dump());
  return {std::move(kept), std::move(verdicts), r.report.ToJson().dump()};
}

std::tuple<std::vector<std::string>, std::string> Pack(const std::vector<std::string>& corpus,
                                                       size_t budget, size_t max_images,
                                                       uint64_t seed, bool reuse_fillers,
                                                       size_t max_misses) {
  PackOptions options;
  options.budget = budget;
  options.max_images = max_images;
  options.reuse_fillers = reuse_fillers;
  options.max_misses = max_misses;
  const WhitespaceTokenizer tokenizer;
  Rng rng(DeriveSeed(seed, "pack"));
  PackStats stats;
  const auto packed = PackMultiturn(Samples(corpus), options, tokenizer, rng, &stats);
  std::vector<std::string> out;
  for (const PackedSequence& seq : packed) out.push_back(ToJson(seq).dump());
  return {std::move(out), stats.ToJson().dump()};
}

std::string WinRate(const std::vector<std::string>& samples,
                    const std::vector<std::tuple<std::string, std::string, double>>& rewards,
                    const std::vector<std::string>& model_ids) {
  std::vector<EvalSample> parsed;
  for (const std::string& s : samples) parsed.push_back(EvalSampleFromJson(ParseJson(s, "eval")));
  return ComputeWinRateMatrix(parsed, Rewards(rewards), model_ids).ToJson().dump();
}

std::string Agreement(const std::vector<std::tuple<std::string, std::string, double>>& rewards,
                      const std::vector<std::string>& human) {
  std::vector<HumanRanking> rankings;
  for (const std::string& h : human) rankings.push_back(HumanRankingFromJson(ParseJson(h, "human")));
  return MetaAgreement(Rewards(rewards), rankings).ToJson().dump();
}

}  // namespace
}  // namespace pfkit

PYBIND11_MODULE(_core, m) {
  using namespace pfkit;
  m.doc() = "Native core of the pfkit data pipeline";

  // Handles live for the life of the interpreter; the translator reads them.
  static PyObject* base = py::exception<Error>(m, "PfkitError", PyExc_RuntimeError).ptr();
  static PyObject* validation =
      py::exception<ValidationError>(m, "ValidationError", base).ptr();
  static PyObject* environment =
      py::exception<EnvironmentError>(m, "PfkitEnvironmentError", base).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const EnvironmentError& e) {
      py::set_error(environment, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("derive_seed", &DeriveSeed, py::arg("seed"), py::arg("key"));
  m.def("rouge_tokens", &RougeTokens, py::arg("text"));
  m.def("rouge_l", &RougeL, py::arg("candidate"), py::arg("reference"), py::arg("beta") = 1.0);

  m.def("command_pool", [] { return CommandPool::Builtin().commands(); });
  m.def(
      "render_llm_distortion_prompt",
      [](const std::string& instruction, const std::string& response,
         std::optional<std::string> command) {
        return RenderLlmDistortionPrompt(
            instruction, response,
            command ? std::optional<std::string_view>(*command) : std::nullopt);
      },
      py::arg("instruction"), py::arg("original_response"), py::arg("command") = py::none());
  m.def("build_llm_distortion_prompt", &BuildPrompt, py::arg("sample_json"), py::arg("seed"));
  m.def("extract_distorted_response", &ExtractDistortedResponse, py::arg("completion"));
  m.def("random_text_augment", &Augment, py::arg("text"), py::arg("seed"));
  m.def("caption_bbox_distortion", &CaptionBbox, py::arg("captions"), py::arg("boxes"),
        py::arg("width"), py::arg("height"));

  m.def(
      "assemble_rewrite_prompt",
      [](const std::string& sample) {
        return AssembleRewritePrompt(SampleFromJson(ParseJson(sample, "sample")));
      },
      py::arg("sample_json"));
  m.def("compute_cache_key", &ComputeCacheKey, py::arg("prompt"), py::arg("image_uris"),
        py::arg("endpoint_id"));

  m.def("length_filter", &LengthFilter, py::arg("response"),
        py::arg("min_chars") = kDefaultMinChars, py::arg("max_chars") = kDefaultMaxChars);
  m.def("change_filter", &ChangeFilter, py::arg("raw"), py::arg("rewritten"));
  m.def("filter_corpus", &FilterCorpus, py::arg("corpus"), py::arg("scorer_table"),
        py::arg("config") = "", py::arg("jobs") = 1);

  m.def(
      "tokenize", [](const std::string& text) { return WhitespaceTokenizer().Encode(text); },
      py::arg("text"));
  m.def("pack_multiturn", &Pack, py::arg("corpus"), py::arg("budget"), py::arg("max_images"),
        py::arg("seed"), py::arg("reuse_fillers") = false, py::arg("max_misses") = 4);
  m.def(
      "loss_mask",
      [](const std::vector<TokenId>& ids) { return LossMask(ids, WhitespaceTokenizer()); },
      py::arg("token_ids"));

  m.def(
      "emit_u_shaped_plan",
      [](const std::string& overrides) {
        return EmitUShapedPlan(overrides.empty() ? Json::object()
                                                 : ParseJson(overrides, "overrides"))
            .ToJson()
            .dump();
      },
      py::arg("overrides") = "");
  m.def("stage1_mix", &Stage1Mix, py::arg("pf_ids"), py::arg("text_ids"), py::arg("llava_ids"),
        py::arg("seed"), py::arg("pf_fraction") = 0.1);

  m.def("win_rate_matrix", &WinRate, py::arg("samples"), py::arg("rewards"),
        py::arg("model_ids") = std::vector<std::string>{});
  m.def(
      "alignment_tax",
      [](const std::map<std::string, double>& before, const std::map<std::string, double>& after) {
        return AlignmentTax(before, after).ToJson().dump();
      },
      py::arg("before"), py::arg("after"));
  m.def("meta_agreement", &Agreement, py::arg("rewards"), py::arg("human"));
}
