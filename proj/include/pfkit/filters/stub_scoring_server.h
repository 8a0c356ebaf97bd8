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

#ifndef PFKIT_FILTERS_STUB_SCORING_SERVER_H_
#define PFKIT_FILTERS_STUB_SCORING_SERVER_H_

#include <memory>
#include <string>
#include <thread>

#include "pfkit/filters/scorer.h"

namespace httplib {
class Server;
}

namespace pfkit {

// Serves a StubScorer table over the scoring wire protocol (see
// HttpScorer), plus GET /health -> {"status": "ok", "loaded_models": []}.
// Malformed bodies get 400; keys the table cannot answer (no entry and no
// default) get 422.
class StubScoringServer {
 public:
  explicit StubScoringServer(std::shared_ptr<StubScorer> table,
                             std::string bearer_token = "");
  ~StubScoringServer();

  StubScoringServer(const StubScoringServer&) = delete;
  StubScoringServer& operator=(const StubScoringServer&) = delete;

  // Binds to host:port (port 0 picks a free port) and serves on a
  // background thread. Returns the bound port.
  int Start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks serving on the calling thread.
  void Listen(const std::string& host, int port);
  void Stop();

  std::string base_url() const;

 private:
  void Install();

  std::shared_ptr<StubScorer> table_;
  std::string bearer_token_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

}  // namespace pfkit

#endif  // PFKIT_FILTERS_STUB_SCORING_SERVER_H_
