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

#include "pfkit/filters/scorer.h"

#include <cmath>

#include "httplib.h"
#include "pfkit/errors.h"
#include "pfkit/gateway/endpoint.h"

namespace pfkit {

std::string_view ScorerKindName(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::kSts:
      return "sts";
    case ScorerKind::kNli:
      return "nli";
    case ScorerKind::kClipScore:
      return "clipscore";
    case ScorerKind::kReward:
      return "reward";
  }
  return "unknown";
}

std::string_view NliLabelName(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment:
      return "entailment";
    case NliLabel::kNeutral:
      return "neutral";
    case NliLabel::kContradiction:
      return "contradiction";
  }
  return "unknown";
}

NliLabel ParseNliLabel(std::string_view name) {
  if (name == "entailment") return NliLabel::kEntailment;
  if (name == "neutral") return NliLabel::kNeutral;
  if (name == "contradiction") return NliLabel::kContradiction;
  throw ParseError("unknown NLI label '" + std::string(name) + "'");
}

ScorerHandle::ScorerHandle(ScorerKind kind, std::shared_ptr<ScorerBackend> backend)
    : kind_(kind), backend_(std::move(backend)) {}

void ScorerHandle::Expect(ScorerKind kind) const {
  if (kind != kind_) {
    throw BadConfig("scorer handle of kind " + std::string(ScorerKindName(kind_)) +
                    " used as " + std::string(ScorerKindName(kind)));
  }
  if (!backend_) {
    throw ScorerUnavailable(std::string(ScorerKindName(kind)) + ": no backend");
  }
}

double ScorerHandle::Sts(const std::string& a, const std::string& b) const {
  Expect(ScorerKind::kSts);
  const double score = backend_->Sts(a, b);
  if (!std::isfinite(score) || score < -1.0 - 1e-9 || score > 1.0 + 1e-9) {
    throw ScorerUnavailable("sts score out of [-1, 1]: " + std::to_string(score));
  }
  return score;
}

NliLabel ScorerHandle::Nli(const std::string& premise,
                           const std::string& hypothesis) const {
  Expect(ScorerKind::kNli);
  return backend_->Nli(premise, hypothesis);
}

double ScorerHandle::ClipScore(const std::string& text,
                               const std::string& image_uri) const {
  Expect(ScorerKind::kClipScore);
  const double score = backend_->ClipScore(text, image_uri);
  if (!std::isfinite(score)) throw ScorerUnavailable("clipscore is not finite");
  return score;
}

double ScorerHandle::Reward(const std::string& instruction,
                            const std::string& response) const {
  Expect(ScorerKind::kReward);
  const double score = backend_->Reward(instruction, response);
  if (!std::isfinite(score)) throw ScorerUnavailable("reward is not finite");
  return score;
}

// ---------------------------------------------------------------------------
// StubScorer

namespace {

std::string Abbrev(const std::string& text) {
  constexpr size_t kMax = 60;
  if (text.size() <= kMax) return text;
  return text.substr(0, kMax) + "...";
}

const Json* OptionalArray(const Json& table, const char* key) {
  auto it = table.find(key);
  if (it == table.end() || it->is_null()) return nullptr;
  if (!it->is_array()) throw SchemaError(key, "expected an array");
  return &*it;
}

}  // namespace

std::shared_ptr<StubScorer> StubScorer::FromJson(const Json& table) {
  if (!table.is_object()) throw BadConfig("scorer table must be a JSON object");
  auto stub = std::make_shared<StubScorer>();
  if (table.contains("model_id")) stub->model_id_ = RequireString(table, "model_id");
  if (const Json* rows = OptionalArray(table, "sts")) {
    for (const Json& row : *rows) {
      const double score = RequireNumber(row, "score");
      if (score < -1.0 || score > 1.0) {
        throw BadConfig("sts table score out of [-1, 1]: " + std::to_string(score));
      }
      stub->SetSts(RequireString(row, "a", true), RequireString(row, "b", true), score);
    }
  }
  if (const Json* rows = OptionalArray(table, "nli")) {
    for (const Json& row : *rows) {
      stub->SetNli(RequireString(row, "premise", true),
                   RequireString(row, "hypothesis", true),
                   ParseNliLabel(RequireString(row, "label")));
    }
  }
  if (const Json* rows = OptionalArray(table, "clipscore")) {
    for (const Json& row : *rows) {
      stub->SetClipScore(RequireString(row, "text", true), RequireString(row, "image", true),
                         RequireNumber(row, "score"));
    }
  }
  if (const Json* rows = OptionalArray(table, "reward")) {
    for (const Json& row : *rows) {
      stub->SetReward(RequireString(row, "instruction", true),
                      RequireString(row, "response", true), RequireNumber(row, "score"));
    }
  }
  auto defaults = table.find("defaults");
  if (defaults != table.end() && !defaults->is_null()) {
    if (!defaults->is_object()) throw SchemaError("defaults", "expected an object");
    if (defaults->contains("sts")) stub->default_sts_ = RequireNumber(*defaults, "sts");
    if (defaults->contains("nli")) {
      stub->default_nli_ = ParseNliLabel(RequireString(*defaults, "nli"));
    }
    if (defaults->contains("clipscore")) {
      stub->default_clipscore_ = RequireNumber(*defaults, "clipscore");
    }
    if (defaults->contains("reward")) {
      stub->default_reward_ = RequireNumber(*defaults, "reward");
    }
  }
  return stub;
}

std::shared_ptr<StubScorer> StubScorer::FromFile(const std::filesystem::path& path) {
  return FromJson(ReadJsonFile(path));
}

void StubScorer::SetSts(const std::string& a, const std::string& b, double score) {
  sts_[{a, b}] = score;
}
void StubScorer::SetNli(const std::string& premise, const std::string& hypothesis,
                        NliLabel label) {
  nli_[{premise, hypothesis}] = label;
}
void StubScorer::SetClipScore(const std::string& text, const std::string& image_uri,
                              double score) {
  clipscore_[{text, image_uri}] = score;
}
void StubScorer::SetReward(const std::string& instruction, const std::string& response,
                           double score) {
  reward_[{instruction, response}] = score;
}

std::optional<double> StubScorer::FindSts(const std::string& a,
                                          const std::string& b) const {
  if (auto it = sts_.find({a, b}); it != sts_.end()) return it->second;
  if (auto it = sts_.find({b, a}); it != sts_.end()) return it->second;
  return std::nullopt;
}

std::optional<NliLabel> StubScorer::FindNli(const std::string& premise,
                                            const std::string& hypothesis) const {
  if (auto it = nli_.find({premise, hypothesis}); it != nli_.end()) return it->second;
  return std::nullopt;
}

std::optional<double> StubScorer::FindClipScore(const std::string& text,
                                                const std::string& image_uri) const {
  if (auto it = clipscore_.find({text, image_uri}); it != clipscore_.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::optional<double> StubScorer::FindReward(const std::string& instruction,
                                             const std::string& response) const {
  if (auto it = reward_.find({instruction, response}); it != reward_.end()) {
    return it->second;
  }
  return std::nullopt;
}

double StubScorer::Sts(const std::string& a, const std::string& b) {
  ++calls_[static_cast<size_t>(ScorerKind::kSts)];
  if (auto hit = FindSts(a, b)) return *hit;
  if (default_sts_) return *default_sts_;
  throw ScorerUnavailable("stub has no sts entry for (\"" + Abbrev(a) + "\", \"" +
                          Abbrev(b) + "\")");
}

NliLabel StubScorer::Nli(const std::string& premise, const std::string& hypothesis) {
  ++calls_[static_cast<size_t>(ScorerKind::kNli)];
  if (auto hit = FindNli(premise, hypothesis)) return *hit;
  if (default_nli_) return *default_nli_;
  throw ScorerUnavailable("stub has no nli entry for (\"" + Abbrev(premise) + "\", \"" +
                          Abbrev(hypothesis) + "\")");
}

double StubScorer::ClipScore(const std::string& text, const std::string& image_uri) {
  ++calls_[static_cast<size_t>(ScorerKind::kClipScore)];
  if (auto hit = FindClipScore(text, image_uri)) return *hit;
  if (default_clipscore_) return *default_clipscore_;
  throw ScorerUnavailable("stub has no clipscore entry for (\"" + Abbrev(text) +
                          "\", \"" + image_uri + "\")");
}

double StubScorer::Reward(const std::string& instruction, const std::string& response) {
  ++calls_[static_cast<size_t>(ScorerKind::kReward)];
  if (auto hit = FindReward(instruction, response)) return *hit;
  if (default_reward_) return *default_reward_;
  throw ScorerUnavailable("stub has no reward entry for (\"" + Abbrev(instruction) +
                          "\", \"" + Abbrev(response) + "\")");
}

size_t StubScorer::calls(ScorerKind kind) const {
  return calls_[static_cast<size_t>(kind)].load();
}

size_t StubScorer::total_calls() const {
  size_t total = 0;
  for (const auto& c : calls_) total += c.load();
  return total;
}

// ---------------------------------------------------------------------------
// HttpScorer

HttpScorer::HttpScorer(std::string base_url, std::string bearer_token,
                       int timeout_seconds)
    : base_url_(std::move(base_url)),
      bearer_token_(std::move(bearer_token)),
      timeout_seconds_(timeout_seconds) {
  std::tie(scheme_host_port_, path_prefix_) = SplitBaseUrl(base_url_);
}

namespace {

std::unique_ptr<httplib::Client> MakeClient(const std::string& host, int timeout,
                                            const std::string& token) {
  auto client = std::make_unique<httplib::Client>(host);
  client->set_connection_timeout(timeout, 0);
  client->set_read_timeout(timeout, 0);
  client->set_write_timeout(timeout, 0);
  if (!token.empty()) client->set_bearer_token_auth(token);
  return client;
}

Json ParseScorerBody(const std::string& where, const std::string& body) {
  Json json;
  try {
    json = Json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw ScorerUnavailable(where + ": response is not JSON");
  }
  if (!json.is_object()) throw ScorerUnavailable(where + ": response is not an object");
  return json;
}

std::string ErrorDetail(const std::string& body) {
  try {
    Json json = Json::parse(body);
    if (json.is_object() && json.contains("error") && json["error"].is_string()) {
      return ": " + json["error"].get<std::string>();
    }
  } catch (const nlohmann::json::parse_error&) {
  }
  return "";
}

double ScoreField(const std::string& where, const Json& json) {
  auto it = json.find("score");
  if (it == json.end() || !it->is_number()) {
    throw ScorerUnavailable(where + ": response lacks a numeric 'score'");
  }
  return it->get<double>();
}

}  // namespace

Json HttpScorer::Post(const std::string& route, const Json& body) const {
  const std::string where = base_url_ + route;
  auto client = MakeClient(scheme_host_port_, timeout_seconds_, bearer_token_);
  auto res = client->Post(path_prefix_ + route, DumpLine(body), "application/json");
  if (!res) {
    throw ScorerUnavailable(where + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ScorerUnavailable(where + ": HTTP " + std::to_string(res->status) +
                            ErrorDetail(res->body));
  }
  return ParseScorerBody(where, res->body);
}

double HttpScorer::Sts(const std::string& a, const std::string& b) {
  Json body;
  body["texts"] = Json::array({a, b});
  return ScoreField(base_url_ + "/sts", Post("/sts", body));
}

NliLabel HttpScorer::Nli(const std::string& premise, const std::string& hypothesis) {
  Json body;
  body["texts"] = Json::array({premise, hypothesis});
  Json json = Post("/nli", body);
  auto it = json.find("label");
  if (it == json.end() || !it->is_string()) {
    throw ScorerUnavailable(base_url_ + "/nli: response lacks a string 'label'");
  }
  try {
    return ParseNliLabel(it->get<std::string>());
  } catch (const ParseError& e) {
    throw ScorerUnavailable(base_url_ + "/nli: " + e.what());
  }
}

double HttpScorer::ClipScore(const std::string& text, const std::string& image_uri) {
  Json body;
  body["text"] = text;
  body["image_uri"] = image_uri;
  return ScoreField(base_url_ + "/clipscore", Post("/clipscore", body));
}

double HttpScorer::Reward(const std::string& instruction, const std::string& response) {
  Json body;
  body["instruction"] = instruction;
  body["response"] = response;
  return ScoreField(base_url_ + "/reward", Post("/reward", body));
}

Json HttpScorer::Health() const {
  const std::string where = base_url_ + "/health";
  auto client = MakeClient(scheme_host_port_, timeout_seconds_, bearer_token_);
  auto res = client->Get(path_prefix_ + "/health");
  if (!res) throw ScorerUnavailable(where + ": " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw ScorerUnavailable(where + ": HTTP " + std::to_string(res->status));
  }
  return ParseScorerBody(where, res->body);
}

ScorerSet ScorerSet::FromBackend(const std::shared_ptr<ScorerBackend>& backend) {
  ScorerSet set;
  set.sts.emplace(ScorerKind::kSts, backend);
  set.nli.emplace(ScorerKind::kNli, backend);
  set.clipscore.emplace(ScorerKind::kClipScore, backend);
  set.reward.emplace(ScorerKind::kReward, backend);
  return set;
}

}  // namespace pfkit
