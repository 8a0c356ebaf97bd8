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

#ifndef PFKIT_FILTERS_SCORER_H_
#define PFKIT_FILTERS_SCORER_H_

#include <array>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "pfkit/json_io.h"

namespace pfkit {

enum class ScorerKind { kSts, kNli, kClipScore, kReward };
enum class NliLabel { kEntailment, kNeutral, kContradiction };

std::string_view ScorerKindName(ScorerKind kind);
std::string_view NliLabelName(NliLabel label);
// Throws ParseError.
NliLabel ParseNliLabel(std::string_view name);

// The pretrained models behind the model-based filters and evaluators.
// Every method throws ScorerUnavailable when the model cannot answer.
class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  virtual std::string model_id() const = 0;
  // Cosine similarity of sentence embeddings, in [-1, 1].
  virtual double Sts(const std::string& a, const std::string& b) = 0;
  virtual NliLabel Nli(const std::string& premise, const std::string& hypothesis) = 0;
  virtual double ClipScore(const std::string& text, const std::string& image_uri) = 0;
  virtual double Reward(const std::string& instruction, const std::string& response) = 0;
};

// A backend bound to the one kind of score a consumer expects.
class ScorerHandle {
 public:
  ScorerHandle(ScorerKind kind, std::shared_ptr<ScorerBackend> backend);

  ScorerKind kind() const { return kind_; }
  ScorerBackend& backend() const { return *backend_; }

  // Each throws BadConfig when called on a handle of another kind, and
  // ScorerUnavailable when the backend is missing or fails.
  double Sts(const std::string& a, const std::string& b) const;
  NliLabel Nli(const std::string& premise, const std::string& hypothesis) const;
  double ClipScore(const std::string& text, const std::string& image_uri) const;
  double Reward(const std::string& instruction, const std::string& response) const;

 private:
  void Expect(ScorerKind kind) const;

  ScorerKind kind_;
  std::shared_ptr<ScorerBackend> backend_;
};

// Table-driven scorer used in tests and dry runs. File format:
//   {"model_id": "stub",
//    "sts":       [{"a": str, "b": str, "score": num}],
//    "nli":       [{"premise": str, "hypothesis": str, "label": str}],
//    "clipscore": [{"text": str, "image": str, "score": num}],
//    "reward":    [{"instruction": str, "response": str, "score": num}],
//    "defaults":  {"sts": num, "nli": str, "clipscore": num, "reward": num}}
// Lookups miss -> the kind's default if present, else ScorerUnavailable.
// STS lookups are symmetric in (a, b).
class StubScorer : public ScorerBackend {
 public:
  static std::shared_ptr<StubScorer> FromJson(const Json& table);
  static std::shared_ptr<StubScorer> FromFile(const std::filesystem::path& path);

  std::string model_id() const override { return model_id_; }
  double Sts(const std::string& a, const std::string& b) override;
  NliLabel Nli(const std::string& premise, const std::string& hypothesis) override;
  double ClipScore(const std::string& text, const std::string& image_uri) override;
  double Reward(const std::string& instruction, const std::string& response) override;

  // Exact-key lookups without defaults; nullopt on a miss.
  std::optional<double> FindSts(const std::string& a, const std::string& b) const;
  std::optional<NliLabel> FindNli(const std::string& premise,
                                  const std::string& hypothesis) const;
  std::optional<double> FindClipScore(const std::string& text,
                                      const std::string& image_uri) const;
  std::optional<double> FindReward(const std::string& instruction,
                                   const std::string& response) const;

  void SetSts(const std::string& a, const std::string& b, double score);
  void SetNli(const std::string& premise, const std::string& hypothesis, NliLabel label);
  void SetClipScore(const std::string& text, const std::string& image_uri, double score);
  void SetReward(const std::string& instruction, const std::string& response,
                 double score);

  size_t calls(ScorerKind kind) const;
  size_t total_calls() const;

 private:
  using Key = std::pair<std::string, std::string>;
  std::string model_id_ = "stub";
  std::map<Key, double> sts_;
  std::map<Key, NliLabel> nli_;
  std::map<Key, double> clipscore_;
  std::map<Key, double> reward_;
  std::optional<double> default_sts_;
  std::optional<NliLabel> default_nli_;
  std::optional<double> default_clipscore_;
  std::optional<double> default_reward_;
  std::array<std::atomic<size_t>, 4> calls_{};
};

// Client for the scoring sidecar:
//   POST /sts       {"texts": [a, b]}                     -> {"score", "model_id"}
//   POST /nli       {"texts": [premise, hypothesis]}      -> {"label", "model_id"}
//   POST /clipscore {"text": str, "image_uri": str}       -> {"score", "model_id"}
//   POST /reward    {"instruction": str, "response": str} -> {"score", "model_id"}
// Any transport failure or non-200 status is ScorerUnavailable.
class HttpScorer : public ScorerBackend {
 public:
  explicit HttpScorer(std::string base_url, std::string bearer_token = "",
                      int timeout_seconds = 60);

  std::string model_id() const override { return base_url_; }
  double Sts(const std::string& a, const std::string& b) override;
  NliLabel Nli(const std::string& premise, const std::string& hypothesis) override;
  double ClipScore(const std::string& text, const std::string& image_uri) override;
  double Reward(const std::string& instruction, const std::string& response) override;

  // GET /health body.
  Json Health() const;

 private:
  Json Post(const std::string& route, const Json& body) const;

  std::string base_url_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::string bearer_token_;
  int timeout_seconds_;
};

// Bundle of handles for every kind, sharing one backend.
struct ScorerSet {
  std::optional<ScorerHandle> sts;
  std::optional<ScorerHandle> nli;
  std::optional<ScorerHandle> clipscore;
  std::optional<ScorerHandle> reward;

  static ScorerSet FromBackend(const std::shared_ptr<ScorerBackend>& backend);
};

}  // namespace pfkit

#endif  // PFKIT_FILTERS_SCORER_H_
