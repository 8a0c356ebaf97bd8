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

#ifndef PFKIT_TESTS_SUPPORT_TEST_SUPPORT_H_
#define PFKIT_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "pfkit/corpus/sample.h"
#include "pfkit/filters/scorer.h"
#include "pfkit/json_io.h"
#include "pfkit/packing/packing.h"
#include "pfkit/random.h"

namespace httplib {
class Server;
}

namespace pfkit::testing {

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Directory holding the checked-in golden files.
std::filesystem::path GoldenDir();
// Repository root (for configs/ and data/).
std::filesystem::path SourceDir();
std::string ReadGolden(const std::string& name);

std::string RandomWord(Rng& rng);
std::string RandomWords(Rng& rng, size_t n);
// Sentences of random words ending in '.', separated by spaces.
std::string RandomSentences(Rng& rng, size_t sentences, size_t words_per_sentence);

// Schema-valid sample with random text; `images` image refs without regions.
InstructionSample RandomSample(Rng& rng, const std::string& id, Category category,
                               size_t images, size_t response_words);

// Mixed-category corpus with occasional short, unchanged and multi-paragraph
// responses, meant to exercise every filter branch.
std::vector<InstructionSample> FuzzFilterCorpus(Rng& rng, size_t n);

// Corpus for packing fuzz: response lengths from a few words to well past
// `budget` tokens, image counts from 0 to max_images + 1.
std::vector<InstructionSample> FuzzPackCorpus(Rng& rng, size_t n, size_t budget,
                                              size_t max_images);

// Independent check of one packed sequence: exact budget length, image cap,
// contiguous turn spans, one mask run per turn covering exactly the
// response span (ending on EOS), zero mask on padding, and agreement with
// the marker-derived mask. Returns "" when every property holds.
std::string CheckPackedSequence(const PackedSequence& seq, const PackOptions& options,
                                const Tokenizer& tokenizer,
                                const std::map<std::string, size_t>& image_counts);

// Scores derived from a hash of the inputs: STS in [-1, 1], CLIPScore in
// [12, 22], every NLI label and rewards in [-5, 5]. Deterministic and
// thread-safe.
class HashScorer : public ScorerBackend {
 public:
  explicit HashScorer(uint64_t salt) : salt_(salt) {}
  std::string model_id() const override { return "hash"; }
  double Sts(const std::string& a, const std::string& b) override;
  NliLabel Nli(const std::string& premise, const std::string& hypothesis) override;
  double ClipScore(const std::string& text, const std::string& image_uri) override;
  double Reward(const std::string& instruction, const std::string& response) override;

 private:
  double Unit(std::string_view tag, const std::string& a, const std::string& b) const;
  uint64_t salt_;
};

// Deterministic stand-in for the generation service: POST /generate
// answers from a pure function of the prompt.
class StubGenerationServer {
 public:
  StubGenerationServer();
  ~StubGenerationServer();
  int Start();
  void Stop();
  std::string base_url() const;
  size_t calls() const { return calls_; }

  static std::string Complete(const std::string& prompt);

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<size_t> calls_{0};
};

// Raw source records for the end-to-end run: `captioning` COCO-style
// records, `vqa` VQAv2-style records and `text` text-instruction records,
// written as coco.jsonl, vqa.jsonl and text.jsonl in `dir`, plus
// captions.jsonl (caption sources for the caption+box strategy),
// scorers.json (a stub table with keep-leaning defaults) and mix.json.
struct E2EFixture {
  std::filesystem::path coco;
  std::filesystem::path vqa;
  std::filesystem::path text;
  std::filesystem::path scorers;
  std::filesystem::path mix;
  std::filesystem::path captions;
  size_t total = 0;
};
E2EFixture WriteE2EFixture(const std::filesystem::path& dir, size_t captioning = 100,
                           size_t vqa = 50, size_t text = 50, uint64_t seed = 7);

// LCS by exhaustive subsequence enumeration of the shorter side when it
// has at most `exhaustive_limit` tokens, by memoized recursion otherwise.
size_t OracleLcs(const std::vector<std::string>& a, const std::vector<std::string>& b,
                 size_t exhaustive_limit = 12);
// (1 + b^2) * LCS / (|candidate| + b^2 * |reference|), zero for empty sides.
double OracleRougeL(const std::vector<std::string>& candidate,
                    const std::vector<std::string>& reference, double beta = 1.0);

// [{"sample_id", "model_id", "score"}] as a reward table.
std::map<std::pair<std::string, std::string>, double> ReadRewardTable(
    const std::filesystem::path& path);

// Runs the CLI in-process and returns its exit status.
int RunPfkit(const std::vector<std::string>& args);

// Byte comparison of two files; false when either is missing.
bool SameBytes(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace pfkit::testing

#endif  // PFKIT_TESTS_SUPPORT_TEST_SUPPORT_H_
