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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pfkit/cli/cli.h"
#include "pfkit/corpus/corpus_io.h"
#include "pfkit/json_io.h"
#include "test_support.h"

namespace pfkit {
namespace {

namespace fs = std::filesystem;
using testing::RunPfkit;
using testing::TempDir;

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

Json ReadJson(const fs::path& path) { return ReadJsonFile(path.string()); }

size_t CountLines(const fs::path& path) {
  std::ifstream in(path);
  size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ++n;
  }
  return n;
}

TEST(CliExitCodes, HelpIsZero) {
  EXPECT_EQ(RunPfkit({"--help"}), 0);
  EXPECT_EQ(RunPfkit({"plan", "--help"}), 0);
}

TEST(CliExitCodes, UnknownFlagIsOne) {
  EXPECT_EQ(RunPfkit({"plan", "--no-such-flag"}), 1);
  EXPECT_EQ(RunPfkit({"no-such-command"}), 1);
}

TEST(CliExitCodes, BadJobsIsOne) {
  TempDir dir;
  EXPECT_EQ(RunPfkit({"--jobs", "0", "plan", "--output", (dir / "p.json").string()}), 1);
}

TEST(CliExitCodes, MissingInputIsTwo) {
  TempDir dir;
  EXPECT_EQ(RunPfkit({"pack", "--input", (dir / "absent.jsonl").string(), "--output",
                      (dir / "out.jsonl").string(), "--budget", "64"}),
            2);
  EXPECT_FALSE(fs::exists(dir / "out.jsonl"));
}

TEST(CliExitCodes, MissingConfigIsTwo) {
  TempDir dir;
  EXPECT_EQ(RunPfkit({"--config", (dir / "absent.json").string(), "plan", "--output",
                      (dir / "p.json").string()}),
            2);
}

TEST(CliExitCodes, MalformedConfigIsOne) {
  TempDir dir;
  WriteText(dir / "bad.json", "{not json");
  EXPECT_EQ(RunPfkit({"--config", (dir / "bad.json").string(), "plan", "--output",
                      (dir / "p.json").string()}),
            1);
}

TEST(CliExitCodes, ModelFiltersWithoutScorerIsOne) {
  TempDir dir;
  Rng rng(3);
  WriteCorpus((dir / "c.jsonl").string(),
              {testing::RandomSample(rng, "a", Category::kCaptioning, 1, 20)});
  EXPECT_EQ(RunPfkit({"filter", "--input", (dir / "c.jsonl").string(), "--output",
                      (dir / "k.jsonl").string()}),
            1);
}

TEST(CliPlan, WritesPlanAndManifest) {
  TempDir dir;
  const fs::path out = dir / "plan.json";
  ASSERT_EQ(RunPfkit({"--seed", "42", "plan", "--output", out.string()}), 0);
  const Json plan = ReadJson(out);
  ASSERT_EQ(plan["stages"].size(), 3u);
  const fs::path manifest_path = fs::path(out.string() + ".run.json");
  ASSERT_TRUE(fs::exists(manifest_path));
  const Json manifest = ReadJson(manifest_path);
  EXPECT_EQ(manifest["command"], "plan");
  EXPECT_EQ(manifest["seed"].get<uint64_t>(), 42u);
  EXPECT_TRUE(manifest.contains("options"));
  EXPECT_EQ(manifest["counts"]["config_hash"], plan["provenance"]["config_hash"]);
}

TEST(CliPlan, SetOverride) {
  TempDir dir;
  const fs::path out = dir / "plan.json";
  ASSERT_EQ(RunPfkit({"plan", "--output", out.string(), "--set", "stage3.learning_rate=1e-5"}),
            0);
  EXPECT_DOUBLE_EQ(ReadJson(out)["stages"][2]["learning_rate"].get<double>(), 1e-5);
}

TEST(CliPlan, BrokenInvariantIsOne) {
  TempDir dir;
  EXPECT_EQ(RunPfkit({"plan", "--output", (dir / "p.json").string(), "--set",
                      "stage1.learning_rate=1e-9"}),
            1);
}

TEST(CliConfig, InjectsGlobalAndSubcommandKeys) {
  TempDir dir;
  const fs::path out = dir / "plan.json";
  Json config;
  config["seed"] = 11;
  config["plan"]["set"] = Json::array({"stage3.learning_rate=1e-5"});
  WriteText(dir / "cfg.json", config.dump());
  ASSERT_EQ(RunPfkit({"--config", (dir / "cfg.json").string(), "plan", "--output", out.string()}),
            0);
  EXPECT_DOUBLE_EQ(ReadJson(out)["stages"][2]["learning_rate"].get<double>(), 1e-5);
  EXPECT_EQ(ReadJson(out.string() + ".run.json")["seed"].get<uint64_t>(), 11u);
}

TEST(CliConfig, CommandLineWins) {
  TempDir dir;
  const fs::path out = dir / "plan.json";
  WriteText(dir / "cfg.json", R"({"seed": 11})");
  ASSERT_EQ(RunPfkit({"--config", (dir / "cfg.json").string(), "--seed", "5", "plan",
                      "--output", out.string()}),
            0);
  EXPECT_EQ(ReadJson(out.string() + ".run.json")["seed"].get<uint64_t>(), 5u);
}

TEST(CliConfig, UnknownKeyIsOne) {
  TempDir dir;
  WriteText(dir / "cfg.json", R"({"plan": {"no_such_key": 1}})");
  EXPECT_EQ(RunPfkit({"--config", (dir / "cfg.json").string(), "plan", "--output",
                      (dir / "p.json").string()}),
            1);
}

TEST(CliConvert, SkipInvalid) {
  TempDir dir;
  WriteText(dir / "vqa.jsonl",
            R"({"question_id": 1, "question": "What color?", "answer": "red", "file_name": "a.png", "width": 4, "height": 4}
{"question_id": 2, "answer": "blue", "file_name": "b.png", "width": 4, "height": 4}
{"question_id": 3, "question": "How many?", "answer": "two", "file_name": "c.png", "width": 4, "height": 4}
)");
  const std::string in = (dir / "vqa.jsonl").string();
  const std::string out = (dir / "out.jsonl").string();
  EXPECT_EQ(RunPfkit({"convert", "--adapter", "vqav2", "--input", in, "--output", out}), 1);
  ASSERT_EQ(
      RunPfkit({"convert", "--adapter", "vqav2", "--input", in, "--output", out, "--skip-invalid"}),
      0);
  const auto samples = ReadCorpus(out);
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].id, "vqav2-1");
  EXPECT_EQ(samples[1].id, "vqav2-3");
  EXPECT_EQ(samples[0].category, Category::kVqaPlain);
}

TEST(CliConvert, UnknownAdapterIsOne) {
  TempDir dir;
  WriteText(dir / "in.jsonl", "{}\n");
  EXPECT_EQ(RunPfkit({"convert", "--adapter", "nope", "--input", (dir / "in.jsonl").string(),
                      "--output", (dir / "o.jsonl").string()}),
            1);
}

TEST(CliRewrite, CacheOnlyMissIsTwoWithErrorFile) {
  TempDir dir;
  Rng rng(12);
  WriteCorpus((dir / "c.jsonl").string(),
              {testing::RandomSample(rng, "a", Category::kCaptioning, 1, 10),
               testing::RandomSample(rng, "b", Category::kCaptioning, 1, 10)});
  fs::create_directories(dir / "cache");
  const fs::path out = dir / "r.jsonl";
  EXPECT_EQ(RunPfkit({"rewrite", "--input", (dir / "c.jsonl").string(), "--output", out.string(),
                      "--endpoint", "http://127.0.0.1:9", "--cache-dir",
                      (dir / "cache").string(), "--cache-only"}),
            2);
  EXPECT_EQ(CountLines(out.string() + ".errors.jsonl"), 2u);
  EXPECT_EQ(CountLines(out), 0u);
}

TEST(CliRewrite, CacheOnlyNeedsCacheDir) {
  TempDir dir;
  Rng rng(12);
  WriteCorpus((dir / "c.jsonl").string(),
              {testing::RandomSample(rng, "a", Category::kCaptioning, 1, 10)});
  unsetenv("PF_CACHE_DIR");
  EXPECT_NE(RunPfkit({"rewrite", "--input", (dir / "c.jsonl").string(), "--output",
                      (dir / "r.jsonl").string(), "--endpoint", "http://127.0.0.1:9",
                      "--cache-only"}),
            0);
}

TEST(CliValidate, ReportsLineNumbers) {
  TempDir dir;
  Rng rng(9);
  WriteCorpus((dir / "c.jsonl").string(),
              {testing::RandomSample(rng, "a", Category::kCaptioning, 1, 10)});
  std::ifstream in(dir / "c.jsonl");
  std::string good;
  std::getline(in, good);
  WriteText(dir / "mixed.jsonl", good + "\n{\"id\": 3}\n");
  const fs::path report = dir / "report.json";
  EXPECT_EQ(RunPfkit({"validate", "--input", (dir / "c.jsonl").string(), "--report",
                      report.string()}),
            0);
  EXPECT_EQ(ReadJson(report)["valid"].get<size_t>(), 1u);
  EXPECT_EQ(RunPfkit({"validate", "--input", (dir / "mixed.jsonl").string(), "--report",
                      report.string()}),
            1);
  const Json r = ReadJson(report);
  EXPECT_EQ(r["valid"].get<size_t>(), 1u);
  ASSERT_EQ(r["errors"].size(), 1u);
  EXPECT_EQ(r["errors"][0]["line"].get<size_t>(), 2u);
}

TEST(CliPack, StageBudgetAndValidate) {
  TempDir dir;
  Rng rng(5);
  std::vector<InstructionSample> corpus;
  for (int i = 0; i < 40; ++i) {
    corpus.push_back(testing::RandomSample(rng, "s" + std::to_string(i), Category::kVqaPlain,
                                           rng.UniformIndex(3), 10 + rng.UniformIndex(30)));
  }
  WriteCorpus((dir / "c.jsonl").string(), corpus);
  const fs::path out = dir / "packed.jsonl";
  ASSERT_EQ(RunPfkit({"--seed", "3", "pack", "--input", (dir / "c.jsonl").string(), "--output",
                      out.string(), "--stage", "stage1"}),
            0);
  const Json manifest = ReadJson(out.string() + ".manifest.json");
  EXPECT_EQ(manifest["budget"].get<size_t>(), 1024u);
  EXPECT_EQ(manifest["max_images"].get<size_t>(), 10u);
  EXPECT_GT(CountLines(out), 0u);
  EXPECT_EQ(RunPfkit({"validate", "--kind", "packed", "--input", out.string(), "--report",
                      (dir / "r.json").string()}),
            0);
  EXPECT_EQ(RunPfkit({"pack", "--input", (dir / "c.jsonl").string(), "--output", out.string(),
                      "--stage", "stage9"}),
            1);
}

TEST(CliPack, SameSeedSameBytes) {
  TempDir dir;
  Rng rng(8);
  std::vector<InstructionSample> corpus;
  for (int i = 0; i < 30; ++i) {
    corpus.push_back(testing::RandomSample(rng, "s" + std::to_string(i), Category::kVqaPlain, 1,
                                           10 + rng.UniformIndex(20)));
  }
  WriteCorpus((dir / "c.jsonl").string(), corpus);
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    ASSERT_EQ(RunPfkit({"--seed", "4", "--jobs", "3", "pack", "--input",
                        (dir / "c.jsonl").string(), "--output", (dir / name).string(),
                        "--budget", "256", "--max-images", "3"}),
              0);
  }
  EXPECT_TRUE(testing::SameBytes(dir / "a.jsonl", dir / "b.jsonl"));
}

TEST(CliEval, RewardMetaAgreementAndWinRate) {
  TempDir dir;
  const fs::path fixture = testing::GoldenDir() / "meta_agreement";
  const auto rewards = testing::ReadRewardTable(fixture / "rewards.json");
  std::map<std::string, Json> samples;
  Json table;
  table["reward"] = Json::array();
  for (const auto& [key, score] : rewards) {
    const auto& [sample_id, model] = key;
    Json& s = samples[sample_id];
    s["id"] = sample_id;
    s["instruction"] = "question " + sample_id;
    s["ground_truth"] = "answer";
    const std::string response = "response of " + model + " to " + sample_id;
    s["responses"][model] = response;
    table["reward"].push_back(
        {{"instruction", "question " + sample_id}, {"response", response}, {"score", score}});
  }
  {
    std::ofstream out(dir / "eval.jsonl");
    for (const auto& [id, s] : samples) out << s.dump() << "\n";
  }
  WriteText(dir / "table.json", table.dump());
  const fs::path summary = dir / "summary.json";
  ASSERT_EQ(RunPfkit({"eval", "--input", (dir / "eval.jsonl").string(), "--output",
                      (dir / "rows.jsonl").string(), "--summary", summary.string(),
                      "--metrics", "reward", "rouge_l", "--stub-scorers",
                      (dir / "table.json").string(), "--human",
                      (fixture / "human.jsonl").string()}),
            0);
  const Json s = ReadJson(summary);
  EXPECT_EQ(s["meta_agreement"]["pairs"].get<size_t>(), 10u);
  EXPECT_EQ(s["meta_agreement"]["agreeing"].get<size_t>(), 7u);
  EXPECT_NEAR(s["meta_agreement"]["accuracy"].get<double>(), 0.7, 1e-12);
  // Only model A answered every sample, so no head-to-head matrix exists.
  EXPECT_FALSE(s.contains("win_rate"));
  EXPECT_EQ(CountLines(dir / "rows.jsonl"), samples.size());
  EXPECT_TRUE(fs::exists(summary.string() + ".run.json"));
}

TEST(CliEval, WinRateOverCommonModels) {
  TempDir dir;
  Json table;
  table["reward"] = Json::array();
  {
    std::ofstream out(dir / "eval.jsonl");
    for (int i = 0; i < 4; ++i) {
      Json s;
      s["id"] = "s" + std::to_string(i);
      s["instruction"] = "q" + std::to_string(i);
      s["ground_truth"] = "g";
      s["responses"]["X"] = "x" + std::to_string(i);
      s["responses"]["Y"] = "y" + std::to_string(i);
      if (i < 2) s["responses"]["Z"] = "z" + std::to_string(i);
      out << s.dump() << "\n";
      table["reward"].push_back({{"instruction", s["instruction"]}, {"response", s["responses"]["X"]},
                                 {"score", i < 3 ? 1.0 : 0.0}});
    }
  }
  table["defaults"] = {{"reward", 0.5}};
  WriteText(dir / "table.json", table.dump());
  const fs::path summary = dir / "s.json";
  ASSERT_EQ(RunPfkit({"eval", "--input", (dir / "eval.jsonl").string(), "--output",
                      (dir / "rows.jsonl").string(), "--summary", summary.string(), "--metrics",
                      "reward", "--stub-scorers", (dir / "table.json").string()}),
            0);
  const Json w = ReadJson(summary)["win_rate"];
  EXPECT_EQ(w["model_ids"], Json::array({"X", "Y"}));
  // X scores 1, 1, 1, 0 against Y's constant 0.5.
  EXPECT_DOUBLE_EQ(w["rates"][0][1].get<double>(), 75.0);
  EXPECT_DOUBLE_EQ(w["rates"][1][0].get<double>(), 25.0);
}

TEST(CliEval, AlignmentTax) {
  TempDir dir;
  WriteText(dir / "before.json", R"({"mmlu": 0.5, "gsm8k": 0.4})");
  WriteText(dir / "after.json", R"({"mmlu": 0.45, "gsm8k": 0.4})");
  const fs::path summary = dir / "s.json";
  ASSERT_EQ(RunPfkit({"eval", "--summary", summary.string(), "--tax-before",
                      (dir / "before.json").string(), "--tax-after",
                      (dir / "after.json").string()}),
            0);
  EXPECT_EQ(ReadJson(summary)["alignment_tax"]["tasks"].size(), 2u);
  EXPECT_EQ(RunPfkit({"eval", "--summary", summary.string()}), 1);
}

}  // namespace
}  // namespace pfkit
