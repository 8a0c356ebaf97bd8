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

#include "pfkit/cli/commands.h"

#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <unordered_map>

#include "spdlog/spdlog.h"

#include "pfkit/corpus/adapter.h"
#include "pfkit/corpus/corpus_io.h"
#include "pfkit/corpus/region_marker.h"
#include "pfkit/distortion/command_pool.h"
#include "pfkit/distortion/llm_prompt.h"
#include "pfkit/distortion/training_set.h"
#include "pfkit/errors.h"
#include "pfkit/evaluation/metrics.h"
#include "pfkit/filters/filters.h"
#include "pfkit/filters/scorer.h"
#include "pfkit/filters/stub_scoring_server.h"
#include "pfkit/gateway/batch_rewrite.h"
#include "pfkit/gateway/endpoint.h"
#include "pfkit/gateway/rewrite_prompt.h"
#include "pfkit/hashing.h"
#include "pfkit/packing/packing.h"
#include "pfkit/packing/tokenizer.h"
#include "pfkit/plan/tuning_plan.h"
#include "pfkit/random.h"
#include "pfkit/text_util.h"

namespace pfkit {

namespace fs = std::filesystem;

namespace {

// Message of an error without its "Kind: " prefix.
std::string Detail(const Error& e) {
  std::string what = e.what();
  const std::string prefix = e.kind() + ": ";
  if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
  return what;
}

std::string OrDefault(const std::string& value, const std::string& output,
                      const char* suffix) {
  return value.empty() ? output + suffix : value;
}

void Require(const std::string& value, const char* flag) {
  if (value.empty()) throw BadConfig(std::string(flag) + " is required");
}

std::string EnvOr(const char* name, const std::string& fallback = "") {
  const char* value = std::getenv(name);
  return value != nullptr && *value != '\0' ? std::string(value) : fallback;
}

void WriteJsonDocument(const fs::path& path, const Json& json) {
  WriteFileAtomic(path, json.dump(2) + "\n");
}

std::shared_ptr<ScorerBackend> MakeScorerBackend(const std::string& stub,
                                                 const std::string& endpoint) {
  if (!stub.empty() && !endpoint.empty()) {
    throw BadConfig("use either --stub-scorers or --scorer-endpoint, not both");
  }
  if (!stub.empty()) return StubScorer::FromFile(stub);
  if (!endpoint.empty()) {
    return std::make_shared<HttpScorer>(endpoint, EnvOr("PF_SCORER_TOKEN"));
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Gateway plumbing shared by distort and rewrite.

struct GatewayRun {
  // Indexed like the requests.
  std::vector<RewriteOutcome> outcomes;
  BatchStats stats;
};

GatewayRun RunGateway(const std::vector<RewriteRequest>& requests,
                      const GatewayOptions& g) {
  std::unique_ptr<GenerationEndpoint> endpoint;
  if (!g.cache_only) {
    endpoint = std::make_unique<HttpGenerationEndpoint>(
        g.endpoint, EnvOr("PF_ENDPOINT_TOKEN"), g.timeout_seconds);
  }
  const std::string cache_dir = g.cache_dir.empty() ? EnvOr("PF_CACHE_DIR") : g.cache_dir;
  std::unique_ptr<RewriteCache> cache;
  if (!cache_dir.empty()) {
    cache = std::make_unique<RewriteCache>(cache_dir);
  } else if (g.cache_only) {
    throw BadConfig("--cache-only needs PF_CACHE_DIR or --cache-dir");
  }

  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < requests.size(); ++i) {
    if (!index.emplace(requests[i].sample_id, i).second) {
      throw SchemaError("id", "duplicate sample id '" + requests[i].sample_id + "'");
    }
  }
  BatchOptions options;
  options.max_in_flight = g.max_in_flight;
  options.max_retries = g.max_retries;
  options.initial_backoff = std::chrono::milliseconds(g.backoff_ms);
  options.cache_only = g.cache_only;

  GatewayRun run;
  run.outcomes.resize(requests.size());
  run.stats = BatchRewrite(requests, endpoint.get(), cache.get(), options,
                           [&](RewriteOutcome outcome) {
                             run.outcomes[index.at(outcome.sample_id)] = std::move(outcome);
                           });
  spdlog::info("gateway requests={} ok={} failed={} cache_hits={} endpoint_calls={} retries={}",
               run.stats.requests, run.stats.succeeded, run.stats.failed,
               run.stats.cache_hits, run.stats.endpoint_calls, run.stats.retries);
  return run;
}

Json ErrorLine(const RewriteOutcome& outcome) {
  Json json;
  json["sample_id"] = outcome.sample_id;
  json["error"] = outcome.error_kind;
  json["message"] = outcome.error_message;
  return json;
}

Json GatewayCounts(const BatchStats& s) {
  Json json;
  json["requests"] = s.requests;
  json["succeeded"] = s.succeeded;
  json["failed"] = s.failed;
  json["cache_hits"] = s.cache_hits;
  json["endpoint_calls"] = s.endpoint_calls;
  json["retries"] = s.retries;
  return json;
}

// ---------------------------------------------------------------------------
// convert helpers

std::string SafeName(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

size_t RenderMarkers(InstructionSample& sample, const fs::path& marker_dir,
                     const fs::path& image_root) {
  size_t rendered = 0;
  for (size_t i = 0; i < sample.images.size(); ++i) {
    ImageRef& image = sample.images[i];
    if (image.regions.empty()) continue;
    std::string path = image.uri;
    if (path.rfind("file://", 0) == 0) path.erase(0, 7);
    fs::path source(path);
    if (source.is_relative()) source = image_root / source;
    const std::string bytes = ReadFile(source);
    ImageFormat format = ImageFormat::kPng;
    Raster raster = DecodeImage(
        std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(bytes.data()),
                                 bytes.size()),
        &format);
    if (raster.width != image.width_px || raster.height != image.height_px) {
      throw SchemaError("images", "declared size " + std::to_string(image.width_px) + "x" +
                                      std::to_string(image.height_px) +
                                      " differs from the decoded image");
    }
    for (const RegionAnnotation& region : image.regions) DrawRegionMarker(raster, region);
    const std::vector<uint8_t> encoded = EncodeImage(raster, format);
    const fs::path target =
        marker_dir / (SafeName(sample.id) + "_" + std::to_string(i) +
                      (format == ImageFormat::kPng ? ".png" : ".ppm"));
    WriteFileAtomic(target, std::string_view(reinterpret_cast<const char*>(encoded.data()),
                                             encoded.size()));
    image.uri = target.string();
    ++rendered;
  }
  if (rendered > 0) sample.metadata["markers"] = "rendered";
  return rendered;
}

std::vector<std::string> ReadIds(const fs::path& path) {
  std::vector<std::string> ids;
  ForEachLine(path, [&](size_t line, std::string_view text) {
    try {
      ids.push_back(RequireString(ParseJson(text, "record"), "id"));
    } catch (const ValidationError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line) + ": " + Detail(e));
    }
  });
  return ids;
}

std::string Sha256OfFile(const fs::path& path) { return Sha256Hex(ReadFile(path)); }

}  // namespace

// ---------------------------------------------------------------------------

int RunConvert(const ConvertOptions& o, CommandContext& ctx) {
  Require(o.adapter, "--adapter");
  Require(o.input, "--input");
  Require(o.output, "--output");
  const AdapterRegistry registry = AdapterRegistry::LoadDirectory(o.adapters_dir);
  const AdapterConfig& adapter = registry.Find(o.adapter);
  const fs::path image_root =
      o.image_root.empty() ? fs::path(o.input).parent_path() : fs::path(o.image_root);
  if (!o.marker_dir.empty()) fs::create_directories(o.marker_dir);

  std::vector<InstructionSample> samples;
  std::map<std::string, size_t> seen;
  size_t records = 0;
  size_t skipped = 0;
  size_t markers = 0;
  ForEachLine(o.input, [&](size_t line, std::string_view text) {
    ++records;
    try {
      InstructionSample sample = ConvertToUnified(ParseJson(text, "record"), adapter);
      if (auto [it, fresh] = seen.emplace(sample.id, line); !fresh) {
        throw SchemaError("id", "duplicate id '" + sample.id + "' (first seen at line " +
                                    std::to_string(it->second) + ")");
      }
      if (!o.marker_dir.empty()) markers += RenderMarkers(sample, o.marker_dir, image_root);
      samples.push_back(std::move(sample));
    } catch (const ValidationError& e) {
      const std::string where = o.input + ":" + std::to_string(line) + ": ";
      if (!o.skip_invalid) throw ValidationError(e.kind(), where + Detail(e));
      ++skipped;
      spdlog::warn("skip {}{}", where, e.what());
    }
  });
  WriteCorpus(o.output, samples);

  ctx.manifest->inputs = {o.input};
  ctx.manifest->outputs = {o.output};
  ctx.manifest->counts["records"] = records;
  ctx.manifest->counts["converted"] = samples.size();
  ctx.manifest->counts["skipped"] = skipped;
  ctx.manifest->counts["markers_rendered"] = markers;
  spdlog::info("convert adapter={} records={} converted={} skipped={}", o.adapter, records,
               samples.size(), skipped);
  return 0;
}

int RunDistort(const DistortOptions& o, CommandContext& ctx) {
  Require(o.output, "--output");
  const std::vector<InstructionSample> multimodal =
      o.multimodal.empty() ? std::vector<InstructionSample>{} : ReadCorpus(o.multimodal);
  const std::vector<InstructionSample> text =
      o.text.empty() ? std::vector<InstructionSample>{} : ReadCorpus(o.text);
  std::vector<CaptionSource> captions;
  if (!o.captions.empty()) {
    ForEachLine(o.captions, [&](size_t line, std::string_view row) {
      try {
        captions.push_back(CaptionSourceFromJson(ParseJson(row, "caption source")));
      } catch (const ValidationError& e) {
        throw ValidationError(e.kind(),
                              o.captions + ":" + std::to_string(line) + ": " + Detail(e));
      }
    });
  }
  MixCounts counts = o.mix.empty() ? MixCounts{} : MixCounts::FromJson(ReadJsonFile(o.mix));
  if (o.scale) counts = counts.Scaled(*o.scale);
  const CommandPool pool =
      o.commands.empty() ? CommandPool::Builtin() : CommandPool::Load(o.commands);

  std::vector<DistortionRecord> records =
      AssembleRewriterTrainingSet(multimodal, text, captions, counts, ctx.seed, pool);

  int status = 0;
  std::vector<Json> errors;
  if (!o.gateway.endpoint.empty()) {
    std::vector<RewriteRequest> requests;
    std::vector<size_t> owner;
    for (size_t i = 0; i < records.size(); ++i) {
      const DistortionRecord& r = records[i];
      if (!r.pending() || !r.distortion_prompt) continue;
      requests.push_back(RewriteRequest::Make(r.sample_id, *r.distortion_prompt,
                                              r.image_uris, o.gateway.max_new_tokens,
                                              o.gateway.endpoint));
      owner.push_back(i);
    }
    GatewayRun run = RunGateway(requests, o.gateway);
    for (size_t k = 0; k < requests.size(); ++k) {
      const RewriteOutcome& outcome = run.outcomes[k];
      if (!outcome.ok()) {
        errors.push_back(ErrorLine(outcome));
        status = 2;
        continue;
      }
      std::string distorted = ExtractDistortedResponse(outcome.result->rewritten);
      if (distorted.empty()) {
        RewriteOutcome bad = outcome;
        bad.error_kind = "MalformedResponse";
        bad.error_message = "no distorted response in completion";
        errors.push_back(ErrorLine(bad));
        status = 2;
        continue;
      }
      records[owner[k]].distorted_response = std::move(distorted);
    }
    ctx.manifest->counts["gateway"] = GatewayCounts(run.stats);
  }

  JsonlWriter out(o.output);
  size_t pending = 0;
  std::map<std::string, size_t> per_strategy;
  for (const DistortionRecord& r : records) {
    out.Write(ToJson(r));
    if (r.pending()) ++pending;
    ++per_strategy[std::string(StrategyName(r.strategy))];
  }
  out.Close();
  ctx.manifest->outputs = {o.output};
  if (!errors.empty()) {
    const std::string path = OrDefault(o.errors, o.output, ".errors.jsonl");
    JsonlWriter err(path);
    for (const Json& e : errors) err.Write(e);
    err.Close();
    ctx.manifest->outputs.push_back(path);
  }
  for (const std::string& in : {o.multimodal, o.text, o.captions}) {
    if (!in.empty()) ctx.manifest->inputs.push_back(in);
  }
  ctx.manifest->counts["records"] = records.size();
  ctx.manifest->counts["pending"] = pending;
  ctx.manifest->counts["by_strategy"] = per_strategy;
  spdlog::info("distort records={} pending={} errors={}", records.size(), pending,
               errors.size());
  return status;
}

int RunRewrite(const RewriteOptions& o, CommandContext& ctx) {
  Require(o.input, "--input");
  Require(o.output, "--output");
  Require(o.gateway.endpoint, "--endpoint");
  std::vector<InstructionSample> corpus = ReadCorpus(o.input);

  std::vector<RewriteRequest> requests;
  std::vector<size_t> owner;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const InstructionSample& s = corpus[i];
    if (!s.raw_annotation || s.raw_annotation->empty()) continue;
    std::vector<std::string> uris;
    for (const ImageRef& image : s.images) uris.push_back(image.uri);
    requests.push_back(RewriteRequest::Make(s.id, AssembleRewritePrompt(s), std::move(uris),
                                            o.gateway.max_new_tokens, o.gateway.endpoint));
    owner.push_back(i);
  }
  GatewayRun run = RunGateway(requests, o.gateway);

  std::vector<bool> failed(corpus.size(), false);
  std::vector<Json> errors;
  for (size_t k = 0; k < requests.size(); ++k) {
    const RewriteOutcome& outcome = run.outcomes[k];
    InstructionSample& s = corpus[owner[k]];
    if (!outcome.ok()) {
      failed[owner[k]] = true;
      errors.push_back(ErrorLine(outcome));
      continue;
    }
    s.response = Trim(outcome.result->rewritten);
  }
  JsonlWriter out(o.output);
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (!failed[i]) out.Write(ToJson(corpus[i]));
  }
  out.Close();
  ctx.manifest->inputs = {o.input};
  ctx.manifest->outputs = {o.output};
  if (!errors.empty()) {
    const std::string path = OrDefault(o.errors, o.output, ".errors.jsonl");
    JsonlWriter err(path);
    for (const Json& e : errors) err.Write(e);
    err.Close();
    ctx.manifest->outputs.push_back(path);
  }
  ctx.manifest->counts["samples"] = corpus.size();
  ctx.manifest->counts["rewritten"] = requests.size() - errors.size();
  ctx.manifest->counts["passthrough"] = corpus.size() - requests.size();
  ctx.manifest->counts["failed"] = errors.size();
  ctx.manifest->counts["gateway"] = GatewayCounts(run.stats);
  if (!errors.empty()) {
    spdlog::error("rewrite failed for {} of {} requests", errors.size(), requests.size());
    return 2;
  }
  return 0;
}

int RunFilter(const FilterOptions& o, CommandContext& ctx) {
  Require(o.input, "--input");
  Require(o.output, "--output");
  FilterConfig config;
  if (o.min_chars) config.min_chars = *o.min_chars;
  if (o.max_chars) config.max_chars = *o.max_chars;
  if (o.sts_threshold) config.sts_threshold = *o.sts_threshold;
  if (o.clipscore_threshold) config.clipscore_threshold = *o.clipscore_threshold;
  for (const std::string& name : o.disable) {
    switch (ParseFilterName(name)) {
      case FilterName::kLength:
        config.enable_length = false;
        break;
      case FilterName::kChange:
        config.enable_change = false;
        break;
      case FilterName::kSts:
        config.enable_sts = false;
        break;
      case FilterName::kClipScore:
        config.enable_clipscore = false;
        break;
      case FilterName::kNli:
        config.enable_nli = false;
        break;
    }
  }
  auto categories = [](const std::vector<std::string>& names) {
    std::set<Category> out;
    for (const std::string& n : names) out.insert(ParseCategory(n));
    return out;
  };
  if (o.sts_categories) config.sts_categories = categories(*o.sts_categories);
  if (o.clipscore_categories) {
    config.clipscore_categories = categories(*o.clipscore_categories);
  }
  if (o.nli_categories) config.nli_categories = categories(*o.nli_categories);
  config.Validate();

  FilterScorers scorers;
  if (auto backend = MakeScorerBackend(o.stub_scorers, o.scorer_endpoint)) {
    scorers = FilterScorers::FromSet(ScorerSet::FromBackend(backend));
  } else if (config.enable_sts || config.enable_clipscore || config.enable_nli) {
    throw BadConfig(
        "model filters need --stub-scorers or --scorer-endpoint "
        "(or --disable sts clipscore nli)");
  }

  const std::vector<InstructionSample> corpus = ReadCorpus(o.input);
  const std::string verdict_path = OrDefault(o.verdicts, o.output, ".verdicts.jsonl");
  const std::string report_path = OrDefault(o.report, o.output, ".report.json");
  JsonlWriter verdicts(verdict_path);
  FilterPipelineResult result =
      RunFilterPipeline(corpus, scorers, config, ctx.jobs,
                        [&](const FilterVerdict& v) { verdicts.Write(ToJson(v)); });
  verdicts.Close();
  WriteCorpus(o.output, result.kept);
  Json report = result.report.ToJson();
  report["config"] = config.ToJson();
  WriteJsonDocument(report_path, report);

  ctx.manifest->options["effective_filter_config"] = config.ToJson();
  ctx.manifest->inputs = {o.input};
  ctx.manifest->outputs = {o.output, verdict_path, report_path};
  ctx.manifest->counts["total_in"] = result.report.total_in;
  ctx.manifest->counts["total_kept"] = result.report.total_kept;
  spdlog::info("filter total_in={} kept={} keep_rate={:.4f}", result.report.total_in,
               result.report.total_kept, result.report.keep_rate);
  return 0;
}

int RunPack(const PackOptionsCli& o, CommandContext& ctx) {
  Require(o.input, "--input");
  Require(o.output, "--output");
  PackOptions options;
  if (!o.stage.empty()) {
    const TrainingPlan plan = EmitUShapedPlan();
    const StageConfig* stage = nullptr;
    for (const StageConfig& s : plan.stages) {
      if (s.name == o.stage) stage = &s;
    }
    if (stage == nullptr) throw BadConfig("unknown stage '" + o.stage + "'");
    options.budget = static_cast<size_t>(stage->context_length);
    options.max_images = static_cast<size_t>(stage->max_images);
  }
  if (o.budget) options.budget = *o.budget;
  if (o.max_images) options.max_images = *o.max_images;
  options.max_misses = o.max_misses;
  options.reuse_fillers = o.reuse_fillers;

  const std::vector<InstructionSample> corpus = ReadCorpus(o.input);
  const WhitespaceTokenizer tokenizer;
  Rng rng(DeriveSeed(ctx.seed, "pack"));
  PackStats stats;
  const std::vector<PackedSequence> packed =
      PackMultiturn(corpus, options, tokenizer, rng, &stats);

  JsonlWriter out(o.output);
  for (size_t i = 0; i < packed.size(); ++i) {
    if (LossMask(packed[i].token_ids, tokenizer) != packed[i].loss_mask) {
      throw MarkerNotFound("sequence " + std::to_string(i) +
                           ": stream mask disagrees with the turn spans");
    }
    out.Write(ToJson(packed[i]));
  }
  out.Close();

  Json manifest;
  manifest["budget"] = options.budget;
  manifest["max_images"] = options.max_images;
  manifest["max_misses"] = options.max_misses;
  manifest["reuse_fillers"] = options.reuse_fillers;
  manifest["seed"] = ctx.seed;
  manifest["tokenizer"] = tokenizer.id();
  manifest["input_sha256"] = Sha256OfFile(o.input);
  manifest["stats"] = stats.ToJson();
  const std::string manifest_path = OrDefault(o.manifest, o.output, ".manifest.json");
  WriteJsonDocument(manifest_path, manifest);

  ctx.manifest->inputs = {o.input};
  ctx.manifest->outputs = {o.output, manifest_path};
  ctx.manifest->counts = stats.ToJson();
  spdlog::info("pack sequences={} turns={} truncated={} skipped={}", stats.sequences,
               stats.turns, stats.truncated, stats.skipped_over_image_cap);
  return 0;
}

int RunPlan(const PlanOptions& o, CommandContext& ctx) {
  Require(o.output, "--output");
  TrainingPlan plan =
      EmitUShapedPlan(o.overrides.empty() ? Json::object() : ReadJsonFile(o.overrides));
  for (const std::string& assignment : o.set) ApplyOverride(plan, assignment);
  CheckPlan(plan);
  WriteJsonDocument(o.output, plan.ToJson());
  ctx.manifest->outputs = {o.output};
  if (!o.overrides.empty()) ctx.manifest->inputs.push_back(o.overrides);
  ctx.manifest->counts["config_hash"] = plan.ConfigHash();

  if (!o.pf.empty()) {
    Require(o.mix_output, "--mix-output");
    const std::vector<std::string> pf = ReadIds(o.pf);
    std::vector<std::string> text;
    std::vector<std::string> llava;
    for (const std::string& path : o.text) {
      for (std::string& id : ReadIds(path)) text.push_back(std::move(id));
    }
    for (const std::string& path : o.llava) {
      for (std::string& id : ReadIds(path)) llava.push_back(std::move(id));
    }
    const std::vector<std::string> ids = Stage1Mix(pf, text, llava, ctx.seed, o.pf_fraction);
    Json mix;
    mix["seed"] = ctx.seed;
    mix["pf_fraction"] = o.pf_fraction;
    mix["pf_total"] = pf.size();
    mix["pf_selected"] = ids.size() - text.size() - llava.size();
    mix["text"] = text.size();
    mix["llava"] = llava.size();
    mix["stages"] = Json::array({"stage1", "stage3"});
    mix["ids"] = ids;
    WriteJsonDocument(o.mix_output, mix);
    ctx.manifest->inputs.push_back(o.pf);
    for (const auto& p : o.text) ctx.manifest->inputs.push_back(p);
    for (const auto& p : o.llava) ctx.manifest->inputs.push_back(p);
    ctx.manifest->outputs.push_back(o.mix_output);
    ctx.manifest->counts["stage1_ids"] = ids.size();
    spdlog::info("plan stage1 mix ids={} pf_selected={}", ids.size(),
                 mix["pf_selected"].get<size_t>());
  }
  return 0;
}

int RunEval(const EvalOptions& o, CommandContext& ctx) {
  Require(o.summary, "--summary");
  const std::set<std::string> known = {"rouge_l", "sts", "qa", "reward"};
  std::set<std::string> metrics;
  for (const std::string& m : o.metrics) {
    if (known.count(m) == 0) throw BadConfig("unknown metric '" + m + "'");
    metrics.insert(m);
  }
  Json summary;
  if (!o.input.empty()) {
    Require(o.output, "--output");
    const std::vector<EvalSample> samples = ReadEvalSamples(o.input);
    const bool needs_scorer =
        metrics.count("sts") || metrics.count("qa") || metrics.count("reward");
    std::shared_ptr<ScorerBackend> backend;
    if (needs_scorer) {
      backend = MakeScorerBackend(o.stub_scorers, o.scorer_endpoint);
      if (!backend) throw BadConfig("metrics sts/qa/reward need a scorer");
    }
    std::optional<ScorerSet> scorers;
    if (backend) scorers = ScorerSet::FromBackend(backend);

    std::map<std::string, std::map<std::string, std::pair<double, size_t>>> sums;
    RewardTable rewards;
    JsonlWriter out(o.output);
    for (const EvalSample& s : samples) {
      Json row;
      row["id"] = s.id;
      for (const auto& [model, response] : s.responses) {
        if (metrics.count("rouge_l")) {
          const double v = RougeL(response, s.ground_truth, o.beta);
          row["rouge_l"][model] = v;
          sums["rouge_l"][model].first += v;
          ++sums["rouge_l"][model].second;
        }
        if (metrics.count("sts")) {
          const double v = StsSimilarity(response, s.ground_truth, *scorers->sts);
          row["sts"][model] = v;
          sums["sts"][model].first += v;
          ++sums["sts"][model].second;
        }
        if (metrics.count("qa")) {
          const QaJudgement j = NliQaJudge(s.instruction, response, s.ground_truth,
                                           *scorers->nli, model, o.bidirectional);
          row["qa"][model] = ToJson(j);
          sums["qa_accuracy"][model].first += j.verdict == QaVerdict::kSuccess ? 1.0 : 0.0;
          ++sums["qa_accuracy"][model].second;
        }
        if (metrics.count("reward")) {
          const double v = scorers->reward->Reward(s.instruction, response);
          row["reward"][model] = v;
          rewards[{s.id, model}] = v;
          sums["reward"][model].first += v;
          ++sums["reward"][model].second;
        }
      }
      out.Write(row);
    }
    out.Close();
    summary["n_samples"] = samples.size();
    Json means = Json::object();
    for (const auto& [metric, per_model] : sums) {
      for (const auto& [model, acc] : per_model) {
        means[metric][model] = acc.first / static_cast<double>(acc.second);
      }
    }
    summary["means"] = means;
    if (metrics.count("reward")) {
      // Head-to-head rates only cover models that answered every sample.
      std::set<std::string> all_models;
      for (const EvalSample& s : samples) {
        for (const auto& [m, r] : s.responses) all_models.insert(m);
      }
      std::vector<std::string> common;
      for (const std::string& m : all_models) {
        bool everywhere = true;
        for (const EvalSample& s : samples) everywhere = everywhere && s.responses.count(m);
        if (everywhere) common.push_back(m);
      }
      if (common.size() >= 2) {
        summary["win_rate"] = ComputeWinRateMatrix(samples, rewards, common).ToJson();
      }
      if (common.size() < all_models.size()) {
        spdlog::warn("win rate covers {} of {} models; the rest miss some samples",
                     common.size() >= 2 ? common.size() : 0, all_models.size());
      }
      if (!o.human.empty()) {
        summary["meta_agreement"] = MetaAgreement(rewards, ReadHumanRankings(o.human)).ToJson();
        ctx.manifest->inputs.push_back(o.human);
      }
    } else if (!o.human.empty()) {
      throw BadConfig("--human needs the reward metric");
    }
    ctx.manifest->inputs.push_back(o.input);
    ctx.manifest->outputs.push_back(o.output);
    ctx.manifest->counts["samples"] = samples.size();
  }
  if (!o.tax_before.empty() || !o.tax_after.empty()) {
    Require(o.tax_before, "--tax-before");
    Require(o.tax_after, "--tax-after");
    auto load = [](const std::string& path) {
      const Json json = ReadJsonFile(path);
      if (!json.is_object()) throw SchemaError(path, "expected {task: score}");
      std::map<std::string, double> scores;
      for (auto it = json.begin(); it != json.end(); ++it) {
        if (!it->is_number()) throw SchemaError(it.key(), "expected a number");
        scores[it.key()] = it->get<double>();
      }
      return scores;
    };
    summary["alignment_tax"] =
        AlignmentTax(load(o.tax_before), load(o.tax_after), "f_llm", "f_mllm", o.tuning_label)
            .ToJson();
    ctx.manifest->inputs.push_back(o.tax_before);
    ctx.manifest->inputs.push_back(o.tax_after);
  }
  if (summary.is_null()) throw BadConfig("nothing to evaluate: give --input or --tax-*");
  WriteJsonDocument(o.summary, summary);
  ctx.manifest->outputs.push_back(o.summary);
  spdlog::info("eval written to {}", o.summary);
  return 0;
}

int RunValidate(const ValidateOptions& o, CommandContext& ctx) {
  Require(o.input, "--input");
  Json report;
  if (o.kind == "corpus") {
    report = ValidateCorpus(o.input).ToJson();
  } else if (o.kind == "plan") {
    report["valid"] = 0;
    report["errors"] = Json::array();
    try {
      TrainingPlan::FromJson(ReadJsonFile(o.input));
      report["valid"] = 1;
    } catch (const ValidationError& e) {
      report["errors"].push_back({{"line", 1}, {"error", e.what()}});
    }
  } else {
    std::function<void(const Json&)> check;
    const WhitespaceTokenizer tokenizer;
    if (o.kind == "records") {
      check = [](const Json& j) {
        const auto problems = CheckDistortionRecord(DistortionRecordFromJson(j));
        if (!problems.empty()) throw SchemaError("record", Join(problems, "; "));
      };
    } else if (o.kind == "verdicts") {
      check = [](const Json& j) { FilterVerdictFromJson(j); };
    } else if (o.kind == "packed") {
      check = [&tokenizer](const Json& j) {
        const PackedSequence seq = PackedSequenceFromJson(j);
        if (LossMask(seq.token_ids, tokenizer) != seq.loss_mask) {
          throw MarkerNotFound("loss_mask disagrees with the token stream");
        }
      };
    } else if (o.kind == "eval") {
      check = [](const Json& j) { EvalSampleFromJson(j); };
    } else if (o.kind == "human") {
      check = [](const Json& j) { HumanRankingFromJson(j); };
    } else {
      throw BadConfig("unknown --kind '" + o.kind + "'");
    }
    size_t valid = 0;
    Json errors = Json::array();
    ForEachLine(o.input, [&](size_t line, std::string_view text) {
      try {
        check(ParseJson(text, "line"));
        ++valid;
      } catch (const ValidationError& e) {
        errors.push_back({{"line", line}, {"error", e.what()}});
      }
    });
    report["valid"] = valid;
    report["errors"] = std::move(errors);
  }
  const bool ok = report["errors"].empty();
  if (o.report.empty()) {
    std::fputs((report.dump(2) + "\n").c_str(), stdout);
  } else {
    WriteJsonDocument(o.report, report);
    ctx.manifest->outputs = {o.report};
  }
  ctx.manifest->inputs = {o.input};
  ctx.manifest->counts["valid"] = report["valid"];
  ctx.manifest->counts["errors"] = report["errors"].size();
  spdlog::info("validate kind={} valid={} errors={}", o.kind, report["valid"].dump(),
               report["errors"].size());
  return ok ? 0 : 1;
}

int RunScorerStub(const ScorerStubOptions& o, CommandContext&) {
  Require(o.table, "--table");
  StubScoringServer server(StubScorer::FromFile(o.table), EnvOr("PF_SCORER_TOKEN"));
  spdlog::info("scorer stub listening on http://{}:{}", o.host, o.port);
  server.Listen(o.host, o.port);
  return 0;
}

}  // namespace pfkit
