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

#ifndef PFKIT_GATEWAY_BATCH_REWRITE_H_
#define PFKIT_GATEWAY_BATCH_REWRITE_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pfkit/gateway/endpoint.h"

namespace pfkit {

// Hex SHA-256 over endpoint id, prompt and image URIs (length-prefixed, so
// no two distinct field tuples collide by concatenation).
std::string ComputeCacheKey(std::string_view prompt,
                            const std::vector<std::string>& image_uris,
                            std::string_view endpoint_id);

struct RewriteRequest {
  std::string sample_id;
  std::string prompt;
  std::vector<std::string> image_uris;
  int max_new_tokens = 512;
  std::string cache_key;

  static RewriteRequest Make(std::string sample_id, std::string prompt,
                             std::vector<std::string> image_uris,
                             int max_new_tokens, std::string_view endpoint_id);
};

struct RewriteResult {
  std::string sample_id;
  std::string rewritten;
  int64_t latency_ms = 0;
  bool from_cache = false;
  std::string endpoint_id;
};

// On-disk key -> text store, one file per key named by the key. Writes are
// serialized and atomic (temp file + rename), so an interrupted run leaves
// only complete entries.
class RewriteCache {
 public:
  explicit RewriteCache(std::filesystem::path dir);

  std::optional<std::string> Get(const std::string& key) const;
  void Put(const std::string& key, const std::string& text);
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path PathFor(const std::string& key) const;

  std::filesystem::path dir_;
  std::mutex write_mu_;
};

struct BatchOptions {
  size_t max_in_flight = 8;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_factor = 2.0;
  // Serve from cache only; a miss is a terminal EndpointUnreachable.
  bool cache_only = false;
};

// Exactly one per request: either `result` or an error.
struct RewriteOutcome {
  std::string sample_id;
  std::optional<RewriteResult> result;
  std::string error_kind;
  std::string error_message;

  bool ok() const { return result.has_value(); }
};

struct BatchStats {
  size_t requests = 0;
  size_t succeeded = 0;
  size_t failed = 0;
  size_t cache_hits = 0;
  size_t endpoint_calls = 0;
  size_t retries = 0;
};

// Runs the requests with at most `max_in_flight` concurrent endpoint calls.
// Cache hits skip the endpoint. Transport errors are retried up to
// `max_retries` times with exponential backoff; after that the outcome is
// EndpointUnreachable. `consumer` is called once per request, never
// concurrently; delivery order is completion order. `endpoint` may be null
// only in cache-only mode, `cache` may be null to disable caching.
BatchStats BatchRewrite(const std::vector<RewriteRequest>& requests,
                        GenerationEndpoint* endpoint, RewriteCache* cache,
                        const BatchOptions& options,
                        const std::function<void(RewriteOutcome)>& consumer);

}  // namespace pfkit

#endif  // PFKIT_GATEWAY_BATCH_REWRITE_H_
