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

#ifndef PFKIT_CLI_COMMANDS_H_
#define PFKIT_CLI_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfkit/cli/run_manifest.h"

namespace pfkit {

// Shared state of one CLI invocation.
struct CommandContext {
  uint64_t seed = 0;
  size_t jobs = 1;
  RunManifest* manifest = nullptr;
};

// Each Run* returns the exit status for a run that got far enough to write
// its outputs (0, or 2 when some endpoint requests failed); all other
// failures are thrown as pfkit::Error.

struct ConvertOptions {
  std::string adapter;
  std::string adapters_dir = "configs/adapters";
  std::string input;
  std::string output;
  // When set, images with regions are re-encoded here with the markers
  // drawn and the sample points at the rendered copy.
  std::string marker_dir;
  // Relative image URIs are resolved against this directory when drawing
  // markers; defaults to the input file's directory.
  std::string image_root;
  bool skip_invalid = false;
};
int RunConvert(const ConvertOptions& options, CommandContext& ctx);

struct GatewayOptions {
  std::string endpoint;
  std::string cache_dir;  // defaults to $PF_CACHE_DIR
  bool cache_only = false;
  size_t max_in_flight = 8;
  int max_retries = 3;
  int backoff_ms = 200;
  int max_new_tokens = 512;
  int timeout_seconds = 120;
};

struct DistortOptions {
  std::string multimodal;
  std::string text;
  std::string captions;
  std::string output;
  std::string mix;  // MixCounts JSON file
  std::optional<double> scale;
  std::string commands;  // command pool file; the built-in pool otherwise
  GatewayOptions gateway;  // endpoint empty: LLM records stay pending
  std::string errors;
};
int RunDistort(const DistortOptions& options, CommandContext& ctx);

struct RewriteOptions {
  std::string input;
  std::string output;
  std::string errors;
  GatewayOptions gateway;
};
int RunRewrite(const RewriteOptions& options, CommandContext& ctx);

struct FilterOptions {
  std::string input;
  std::string output;
  std::string verdicts;
  std::string report;
  std::string stub_scorers;
  std::string scorer_endpoint;
  std::optional<double> sts_threshold;
  std::optional<double> clipscore_threshold;
  std::optional<size_t> min_chars;
  std::optional<size_t> max_chars;
  std::vector<std::string> disable;
  std::optional<std::vector<std::string>> sts_categories;
  std::optional<std::vector<std::string>> clipscore_categories;
  std::optional<std::vector<std::string>> nli_categories;
};
int RunFilter(const FilterOptions& options, CommandContext& ctx);

struct PackOptionsCli {
  std::string input;
  std::string output;
  std::string manifest;
  std::string stage;  // stage1|stage2|stage3 take budget and images from the plan
  std::optional<size_t> budget;
  std::optional<size_t> max_images;
  size_t max_misses = 4;
  bool reuse_fillers = false;
};
int RunPack(const PackOptionsCli& options, CommandContext& ctx);

struct PlanOptions {
  std::string output;
  std::string overrides;
  std::vector<std::string> set;
  std::string pf;
  std::vector<std::string> text;
  std::vector<std::string> llava;
  std::string mix_output;
  double pf_fraction = 0.1;
};
int RunPlan(const PlanOptions& options, CommandContext& ctx);

struct EvalOptions {
  std::string input;
  std::string output;
  std::string summary;
  std::vector<std::string> metrics = {"rouge_l"};
  double beta = 1.0;
  bool bidirectional = false;
  std::string stub_scorers;
  std::string scorer_endpoint;
  std::string human;
  std::string tax_before;
  std::string tax_after;
  std::string tuning_label;
};
int RunEval(const EvalOptions& options, CommandContext& ctx);

struct ValidateOptions {
  std::string input;
  std::string kind = "corpus";
  std::string report;
};
int RunValidate(const ValidateOptions& options, CommandContext& ctx);

struct ScorerStubOptions {
  std::string table;
  std::string host = "127.0.0.1";
  int port = 8700;
};
int RunScorerStub(const ScorerStubOptions& options, CommandContext& ctx);

}  // namespace pfkit

#endif  // PFKIT_CLI_COMMANDS_H_
