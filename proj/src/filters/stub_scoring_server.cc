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

#include "pfkit/filters/stub_scoring_server.h"

#include "httplib.h"
#include "pfkit/errors.h"

namespace pfkit {

namespace {

void Reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(DumpLine(body), "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& message) {
  Json body;
  body["error"] = message;
  Reply(res, status, body);
}

// Parses {"texts": [str, str]}; nullopt on a malformed body.
std::optional<std::pair<std::string, std::string>> ParsePair(const std::string& body) {
  Json json = Json::parse(body, nullptr, false);
  if (json.is_discarded() || !json.is_object()) return std::nullopt;
  auto it = json.find("texts");
  if (it == json.end() || !it->is_array() || it->size() != 2 ||
      !(*it)[0].is_string() || !(*it)[1].is_string()) {
    return std::nullopt;
  }
  return std::make_pair((*it)[0].get<std::string>(), (*it)[1].get<std::string>());
}

std::optional<std::pair<std::string, std::string>> ParseFields(const std::string& body,
                                                               const char* first,
                                                               const char* second) {
  Json json = Json::parse(body, nullptr, false);
  if (json.is_discarded() || !json.is_object()) return std::nullopt;
  auto a = json.find(first);
  auto b = json.find(second);
  if (a == json.end() || b == json.end() || !a->is_string() || !b->is_string()) {
    return std::nullopt;
  }
  return std::make_pair(a->get<std::string>(), b->get<std::string>());
}

// Table lookup with the table's defaults; nullopt on a miss.
template <typename Fn>
auto Lookup(Fn fn) -> std::optional<decltype(fn())> {
  try {
    return fn();
  } catch (const ScorerUnavailable&) {
    return std::nullopt;
  }
}

}  // namespace

StubScoringServer::StubScoringServer(std::shared_ptr<StubScorer> table,
                                     std::string bearer_token)
    : table_(std::move(table)),
      bearer_token_(std::move(bearer_token)),
      server_(std::make_unique<httplib::Server>()) {
  Install();
}

StubScoringServer::~StubScoringServer() { Stop(); }

void StubScoringServer::Install() {
  const std::string model_id = table_->model_id();
  auto authorized = [this](const httplib::Request& req, httplib::Response& res) {
    if (bearer_token_.empty()) return true;
    if (req.get_header_value("Authorization") == "Bearer " + bearer_token_) return true;
    ReplyError(res, 401, "unauthorized");
    return false;
  };

  server_->Get("/health", [](const httplib::Request&,
                               httplib::Response& res) {
    Json body;
    body["status"] = "ok";
    body["loaded_models"] = Json::array();
    Reply(res, 200, body);
  });

  server_->Post("/sts", [this, authorized, model_id](const httplib::Request& req,
                                                     httplib::Response& res) {
    if (!authorized(req, res)) return;
    auto texts = ParsePair(req.body);
    if (!texts) return ReplyError(res, 400, "expected {\"texts\": [str, str]}");
    auto score = Lookup([&] { return table_->Sts(texts->first, texts->second); });
    if (!score) return ReplyError(res, 422, "no sts entry");
    Json body;
    body["score"] = *score;
    body["model_id"] = model_id;
    Reply(res, 200, body);
  });

  server_->Post("/nli", [this, authorized, model_id](const httplib::Request& req,
                                                     httplib::Response& res) {
    if (!authorized(req, res)) return;
    auto texts = ParsePair(req.body);
    if (!texts) return ReplyError(res, 400, "expected {\"texts\": [str, str]}");
    auto label = Lookup([&] { return table_->Nli(texts->first, texts->second); });
    if (!label) return ReplyError(res, 422, "no nli entry");
    Json body;
    body["label"] = std::string(NliLabelName(*label));
    body["model_id"] = model_id;
    Reply(res, 200, body);
  });

  server_->Post("/clipscore", [this, authorized, model_id](const httplib::Request& req,
                                                           httplib::Response& res) {
    if (!authorized(req, res)) return;
    auto fields = ParseFields(req.body, "text", "image_uri");
    if (!fields) return ReplyError(res, 400, "expected {\"text\", \"image_uri\"}");
    auto score = Lookup([&] { return table_->ClipScore(fields->first, fields->second); });
    if (!score) return ReplyError(res, 422, "no clipscore entry");
    Json body;
    body["score"] = *score;
    body["model_id"] = model_id;
    Reply(res, 200, body);
  });

  server_->Post("/reward", [this, authorized, model_id](const httplib::Request& req,
                                                        httplib::Response& res) {
    if (!authorized(req, res)) return;
    auto fields = ParseFields(req.body, "instruction", "response");
    if (!fields) return ReplyError(res, 400, "expected {\"instruction\", \"response\"}");
    auto score = Lookup([&] { return table_->Reward(fields->first, fields->second); });
    if (!score) return ReplyError(res, 422, "no reward entry");
    Json body;
    body["score"] = *score;
    body["model_id"] = model_id;
    Reply(res, 200, body);
  });
}

int StubScoringServer::Start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw IoError("cannot bind scorer stub to " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void StubScoringServer::Listen(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) {
    throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void StubScoringServer::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubScoringServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace pfkit
