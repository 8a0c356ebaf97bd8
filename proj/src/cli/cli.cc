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

#include "pfkit/cli/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <system_error>

#include "CLI11.hpp"
#include "spdlog/sinks/stdout_sinks.h"
#include "spdlog/spdlog.h"

#include "pfkit/cli/commands.h"
#include "pfkit/errors.h"

namespace pfkit {

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitEnvironment = 2;

// "sts_threshold" -> "--sts-threshold".
std::string FlagName(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

bool HasFlag(const std::vector<std::string>& args, size_t begin, size_t end,
             const std::string& flag) {
  for (size_t i = begin; i < end && i < args.size(); ++i) {
    if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::string ScalarText(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  return value.dump();
}

void AppendConfigValue(std::vector<std::string>& out, const std::string& flag,
                       const Json& value) {
  if (value.is_null()) return;
  if (value.is_array()) {
    for (const Json& item : value) out.push_back(flag + "=" + ScalarText(item));
    return;
  }
  if (value.is_object()) throw BadConfig("config value for " + flag + " is an object");
  out.push_back(flag + "=" + ScalarText(value));
}

// Expands --config FILE into explicit flags. Top-level scalar keys feed the
// global options and the object under the subcommand's name feeds that
// subcommand. Flags given on the command line win.
std::vector<std::string> InjectConfig(std::vector<std::string> args,
                                      const std::vector<std::string>& subcommands) {
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;
  const Json config = ReadJsonFile(config_path);
  if (!config.is_object()) throw BadConfig("config file must hold a JSON object");

  size_t sub_pos = args.size();
  std::string sub;
  for (size_t i = 0; i < args.size(); ++i) {
    if (std::find(subcommands.begin(), subcommands.end(), args[i]) != subcommands.end()) {
      sub_pos = i;
      sub = args[i];
      break;
    }
  }
  std::vector<std::string> global;
  std::vector<std::string> local;
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (std::find(subcommands.begin(), subcommands.end(), it.key()) != subcommands.end()) {
      if (it.key() != sub) continue;
      if (!it->is_object()) throw BadConfig("config section '" + sub + "' must be an object");
      for (auto f = it->begin(); f != it->end(); ++f) {
        const std::string flag = FlagName(f.key());
        if (HasFlag(args, sub_pos, args.size(), flag)) continue;
        if (f->is_boolean()) {
          if (f->get<bool>()) local.push_back(flag);
          continue;
        }
        AppendConfigValue(local, flag, *f);
      }
      continue;
    }
    const std::string flag = FlagName(it.key());
    if (HasFlag(args, 0, args.size(), flag)) continue;
    AppendConfigValue(global, flag, *it);
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<ptrdiff_t>(sub_pos));
  out.insert(out.end(), global.begin(), global.end());
  if (sub_pos < args.size()) {
    out.push_back(args[sub_pos]);
    out.insert(out.end(), local.begin(), local.end());
    out.insert(out.end(), args.begin() + static_cast<ptrdiff_t>(sub_pos) + 1, args.end());
  }
  return out;
}

// Options as given or defaulted, for the manifest and its config hash.
Json EffectiveOptions(const CLI::App& app) {
  Json json = Json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const std::vector<std::string>& results = opt->results();
      if (opt->get_expected_max() > 1 || results.size() > 1) {
        json[name] = results;
      } else if (opt->get_type_size() == 0) {
        json[name] = true;
      } else {
        json[name] = results.empty() ? "" : results.front();
      }
    } else if (!opt->get_default_str().empty()) {
      json[name] = opt->get_default_str();
    }
  }
  return json;
}

void ConfigureLogging(const std::string& level) {
  auto logger = spdlog::get("pfkit");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("pfkit");
    logger->set_pattern("%Y-%m-%dT%H:%M:%S.%eZ %l %v", spdlog::pattern_time_type::utc);
    spdlog::set_default_logger(logger);
  }
  const spdlog::level::level_enum parsed = spdlog::level::from_str(level);
  spdlog::set_level(parsed == spdlog::level::off && level != "off" ? spdlog::level::info
                                                                     : parsed);
}

void AddGatewayOptions(CLI::App* sub, GatewayOptions& g, bool endpoint_required) {
  auto* endpoint = sub->add_option("--endpoint", g.endpoint,
                                   "Generation endpoint base URL (also the cache namespace)");
  if (endpoint_required) endpoint->required();
  sub->add_option("--cache-dir", g.cache_dir, "Rewrite cache directory (default $PF_CACHE_DIR)");
  sub->add_flag("--cache-only", g.cache_only, "Serve from the cache, never call the endpoint");
  sub->add_option("--max-in-flight", g.max_in_flight, "Concurrent endpoint requests")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-retries", g.max_retries, "Retries on transport errors")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--backoff-ms", g.backoff_ms, "Initial retry backoff")->capture_default_str();
  sub->add_option("--max-new-tokens", g.max_new_tokens)->capture_default_str();
  sub->add_option("--timeout", g.timeout_seconds, "Per-request timeout in seconds")
      ->capture_default_str();
}

}  // namespace

int RunCli(const std::vector<std::string>& raw_args) {
  CLI::App app{"pfkit: curation, filtering, packing and evaluation toolkit for visual "
               "instruction tuning data",
               "pfkit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  std::string config_path;
  uint64_t seed = 0;
  size_t jobs = 1;
  std::string log_level = "info";
  app.add_option("--config", config_path, "JSON config: global keys plus one object per subcommand");
  app.add_option("--seed", seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->capture_default_str();

  std::map<std::string, std::function<int(CommandContext&)>> runners;
  std::map<std::string, std::function<std::string()>> primary_output;
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    return sub;
  };

  ConvertOptions convert;
  {
    CLI::App* sub = add("convert", "Convert source-dataset records to the unified corpus");
    sub->add_option("--adapter", convert.adapter, "Adapter name")->required();
    sub->add_option("--adapters-dir", convert.adapters_dir)->capture_default_str();
    sub->add_option("--input", convert.input, "Source records (JSONL)")->required();
    sub->add_option("--output", convert.output, "Unified corpus (JSONL)")->required();
    sub->add_option("--marker-dir", convert.marker_dir, "Write region-marked images here");
    sub->add_option("--image-root", convert.image_root, "Base for relative image URIs");
    sub->add_flag("--skip-invalid", convert.skip_invalid, "Skip bad records instead of failing");
    runners["convert"] = [&](CommandContext& c) { return RunConvert(convert, c); };
    primary_output["convert"] = [&] { return convert.output; };
  }

  DistortOptions distort;
  {
    CLI::App* sub = add("distort", "Assemble the rewriter training mixture");
    sub->add_option("--multimodal", distort.multimodal, "Multi-modal instruction corpus");
    sub->add_option("--text", distort.text, "Text-only instruction corpus");
    sub->add_option("--captions", distort.captions, "Caption sources (JSONL)");
    sub->add_option("--output", distort.output, "Distortion records (JSONL)")->required();
    sub->add_option("--mix", distort.mix, "Mixture counts (JSON)");
    sub->add_option("--scale", distort.scale, "Multiply every mixture count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--commands", distort.commands, "Command pool file");
    sub->add_option("--errors", distort.errors, "Failed generation requests (JSONL)");
    AddGatewayOptions(sub, distort.gateway, false);
    runners["distort"] = [&](CommandContext& c) { return RunDistort(distort, c); };
    primary_output["distort"] = [&] { return distort.output; };
  }

  RewriteOptions rewrite;
  {
    CLI::App* sub = add("rewrite", "Rewrite raw annotations through a generation endpoint");
    sub->add_option("--input", rewrite.input, "Unified corpus")->required();
    sub->add_option("--output", rewrite.output, "Rewritten corpus")->required();
    sub->add_option("--errors", rewrite.errors, "Failed requests (JSONL)");
    AddGatewayOptions(sub, rewrite.gateway, true);
    runners["rewrite"] = [&](CommandContext& c) { return RunRewrite(rewrite, c); };
    primary_output["rewrite"] = [&] { return rewrite.output; };
  }

  FilterOptions filter;
  {
    CLI::App* sub = add("filter", "Run the rule and model filters");
    sub->add_option("--input", filter.input, "Rewritten corpus")->required();
    sub->add_option("--output", filter.output, "Kept samples")->required();
    sub->add_option("--verdicts", filter.verdicts, "Verdict sidecar (JSONL)");
    sub->add_option("--report", filter.report, "Report (JSON)");
    sub->add_option("--stub-scorers", filter.stub_scorers, "Scorer table file");
    sub->add_option("--scorer-endpoint", filter.scorer_endpoint, "Scoring service URL");
    sub->add_option("--sts-threshold", filter.sts_threshold);
    sub->add_option("--clipscore-threshold", filter.clipscore_threshold);
    sub->add_option("--min-chars", filter.min_chars);
    sub->add_option("--max-chars", filter.max_chars);
    sub->add_option("--disable", filter.disable, "Filters to switch off")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--sts-categories", filter.sts_categories)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--clipscore-categories", filter.clipscore_categories)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--nli-categories", filter.nli_categories)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    runners["filter"] = [&](CommandContext& c) { return RunFilter(filter, c); };
    primary_output["filter"] = [&] { return filter.output; };
  }

  PackOptionsCli pack;
  {
    CLI::App* sub = add("pack", "Pack samples into multi-turn training sequences");
    sub->add_option("--input", pack.input, "Corpus")->required();
    sub->add_option("--output", pack.output, "Packed sequences (JSONL)")->required();
    sub->add_option("--manifest", pack.manifest, "Packing manifest (JSON)");
    sub->add_option("--stage", pack.stage, "Take budget and image cap from a plan stage")
        ->check(CLI::IsMember({"stage1", "stage2", "stage3"}));
    sub->add_option("--budget", pack.budget, "Tokens per sequence")->check(CLI::PositiveNumber);
    sub->add_option("--max-images", pack.max_images, "Images per sequence");
    sub->add_option("--max-misses", pack.max_misses)->capture_default_str();
    sub->add_flag("--reuse-fillers", pack.reuse_fillers,
                  "Draw fillers from the whole corpus for every seed");
    runners["pack"] = [&](CommandContext& c) { return RunPack(pack, c); };
    primary_output["pack"] = [&] { return pack.output; };
  }

  PlanOptions plan;
  {
    CLI::App* sub = add("plan", "Emit the three-stage tuning plan and stage-1 mix");
    sub->add_option("--output", plan.output, "Plan (JSON)")->required();
    sub->add_option("--overrides", plan.overrides, "Override document (JSON)");
    sub->add_option("--set", plan.set, "Override such as stage3.learning_rate=1e-5")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--pf", plan.pf, "Filtered corpus for the stage-1 subsample");
    sub->add_option("--text", plan.text, "Text-only corpora")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--llava", plan.llava, "LLaVA-style corpora")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--mix-output", plan.mix_output, "Stage-1 id list (JSON)");
    sub->add_option("--pf-fraction", plan.pf_fraction)->capture_default_str();
    runners["plan"] = [&](CommandContext& c) { return RunPlan(plan, c); };
    primary_output["plan"] = [&] { return plan.output; };
  }

  EvalOptions eval;
  {
    CLI::App* sub = add("eval", "Score model responses");
    sub->add_option("--input", eval.input, "Evaluation samples (JSONL)");
    sub->add_option("--output", eval.output, "Per-sample results (JSONL)");
    sub->add_option("--summary", eval.summary, "Summary (JSON)")->required();
    sub->add_option("--metrics", eval.metrics, "rouge_l sts qa reward")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->capture_default_str();
    sub->add_option("--beta", eval.beta, "Rouge-L recall weight")->capture_default_str();
    sub->add_flag("--bidirectional", eval.bidirectional, "QA judge checks both directions");
    sub->add_option("--stub-scorers", eval.stub_scorers, "Scorer table file");
    sub->add_option("--scorer-endpoint", eval.scorer_endpoint, "Scoring service URL");
    sub->add_option("--human", eval.human, "Human rankings (JSONL)");
    sub->add_option("--tax-before", eval.tax_before, "Task scores before tuning (JSON)");
    sub->add_option("--tax-after", eval.tax_after, "Task scores after tuning (JSON)");
    sub->add_option("--tuning-label", eval.tuning_label);
    runners["eval"] = [&](CommandContext& c) { return RunEval(eval, c); };
    primary_output["eval"] = [&] { return eval.summary; };
  }

  ValidateOptions validate;
  {
    CLI::App* sub = add("validate", "Check a file against its schema");
    sub->add_option("--input", validate.input)->required();
    sub->add_option("--kind", validate.kind)
        ->capture_default_str()
        ->check(CLI::IsMember({"corpus", "records", "verdicts", "packed", "plan", "eval",
                               "human"}));
    sub->add_option("--report", validate.report, "Write the report here instead of stdout");
    runners["validate"] = [&](CommandContext& c) { return RunValidate(validate, c); };
    primary_output["validate"] = [&] { return validate.report; };
  }

  ScorerStubOptions stub;
  {
    CLI::App* sub = add("scorer-stub", "Serve a scorer table over HTTP");
    sub->add_option("--table", stub.table)->required();
    sub->add_option("--host", stub.host)->capture_default_str();
    sub->add_option("--port", stub.port)->capture_default_str();
    runners["scorer-stub"] = [&](CommandContext& c) { return RunScorerStub(stub, c); };
    primary_output["scorer-stub"] = [] { return std::string(); };
  }

  std::vector<std::string> names;
  for (const auto& [name, fn] : runners) names.push_back(name);

  try {
    std::vector<std::string> args = InjectConfig(raw_args, names);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const Error& e) {
    std::fprintf(stderr, "error kind=%s class=%s msg=%s\n", e.kind().c_str(),
                 e.error_class() == ErrorClass::kValidation ? "validation" : "environment",
                 e.what());
    return e.error_class() == ErrorClass::kValidation ? kExitValidation : kExitEnvironment;
  }

  ConfigureLogging(log_level);
  const CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();

  RunManifest manifest;
  manifest.command = command;
  manifest.seed = seed;
  manifest.options = EffectiveOptions(*chosen);
  manifest.options["seed"] = seed;
  manifest.options["jobs"] = jobs;
  manifest.HashOptions();
  manifest.started_at = UtcTimestamp();
  CommandContext ctx{seed, jobs, &manifest};

  int status = 0;
  try {
    status = runners.at(command)(ctx);
  } catch (const Error& e) {
    spdlog::error("{} failed kind={} class={} msg={}", command, e.kind(),
                  e.error_class() == ErrorClass::kValidation ? "validation" : "environment",
                  e.what());
    return e.error_class() == ErrorClass::kValidation ? kExitValidation : kExitEnvironment;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{} failed kind=IoError msg={}", command, e.what());
    return kExitEnvironment;
  } catch (const std::exception& e) {
    spdlog::error("{} failed kind=Internal msg={}", command, e.what());
    return kExitValidation;
  }
  manifest.finished_at = UtcTimestamp();
  const std::string output = primary_output.at(command)();
  if (!output.empty()) {
    try {
      manifest.Write(ManifestPathFor(output));
    } catch (const Error& e) {
      spdlog::error("{} manifest not written: {}", command, e.what());
      return kExitEnvironment;
    }
  }
  spdlog::info("{} finished status={}", command, status);
  return status;
}

int RunCli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return RunCli(args);
}

}  // namespace pfkit
