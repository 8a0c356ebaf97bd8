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

#include "pfkit/gateway/batch_rewrite.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "pfkit/hashing.h"

namespace pfkit {
namespace {

void AppendField(std::string& out, std::string_view field) {
  out.append(std::to_string(field.size())).push_back(':');
  out.append(field);
}

}  // namespace

std::string ComputeCacheKey(std::string_view prompt,
                            const std::vector<std::string>& image_uris,
                            std::string_view endpoint_id) {
  std::string material;
  AppendField(material, endpoint_id);
  AppendField(material, prompt);
  material.append(std::to_string(image_uris.size())).push_back('#');
  for (const auto& uri : image_uris) AppendField(material, uri);
  return Sha256Hex(material);
}

RewriteRequest RewriteRequest::Make(std::string sample_id, std::string prompt,
                                    std::vector<std::string> image_uris,
                                    int max_new_tokens, std::string_view endpoint_id) {
  RewriteRequest r;
  r.cache_key = ComputeCacheKey(prompt, image_uris, endpoint_id);
  r.sample_id = std::move(sample_id);
  r.prompt = std::move(prompt);
  r.image_uris = std::move(image_uris);
  r.max_new_tokens = max_new_tokens;
  return r;
}

RewriteCache::RewriteCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache dir " + dir_.string() + ": " + ec.message());
}

std::filesystem::path RewriteCache::PathFor(const std::string& key) const {
  if (key.empty() || key.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw BadConfig("cache key must be lowercase hex: " + key);
  }
  return dir_ / key;
}

std::optional<std::string> RewriteCache::Get(const std::string& key) const {
  const auto path = PathFor(key);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  return ReadFile(path);
}

void RewriteCache::Put(const std::string& key, const std::string& text) {
  const auto path = PathFor(key);
  std::lock_guard<std::mutex> lock(write_mu_);
  WriteFileAtomic(path, text);
}

BatchStats BatchRewrite(const std::vector<RewriteRequest>& requests,
                        GenerationEndpoint* endpoint, RewriteCache* cache,
                        const BatchOptions& options,
                        const std::function<void(RewriteOutcome)>& consumer) {
  if (endpoint == nullptr && !options.cache_only) {
    throw BadConfig("no generation endpoint and cache-only mode is off");
  }
  if (options.max_in_flight == 0) throw BadConfig("max_in_flight must be positive");

  BatchStats stats;
  stats.requests = requests.size();
  std::mutex consumer_mu;
  std::atomic<size_t> next{0};
  std::atomic<size_t> cache_hits{0};
  std::atomic<size_t> endpoint_calls{0};
  std::atomic<size_t> retries{0};
  const std::string endpoint_id = endpoint ? endpoint->id() : "cache";

  std::exception_ptr consumer_error;
  auto deliver = [&](RewriteOutcome outcome) {
    std::lock_guard<std::mutex> lock(consumer_mu);
    if (consumer_error) return;
    if (outcome.ok()) {
      ++stats.succeeded;
    } else {
      ++stats.failed;
    }
    try {
      consumer(std::move(outcome));
    } catch (...) {
      consumer_error = std::current_exception();
      next.store(requests.size());
    }
  };

  auto process = [&](const RewriteRequest& request) {
    RewriteOutcome outcome;
    outcome.sample_id = request.sample_id;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - start)
          .count();
    };
    if (cache != nullptr) {
      if (std::optional<std::string> hit = cache->Get(request.cache_key)) {
        ++cache_hits;
        outcome.result = RewriteResult{request.sample_id, std::move(*hit), elapsed_ms(),
                                       true, endpoint_id};
        return outcome;
      }
    }
    if (options.cache_only) {
      outcome.error_kind = "EndpointUnreachable";
      outcome.error_message = "cache-only mode and no cached entry";
      return outcome;
    }
    GenerateCall call{request.prompt, request.image_uris, request.max_new_tokens};
    auto backoff = options.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      try {
        ++endpoint_calls;
        std::string text = endpoint->Generate(call);
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
          throw MalformedResponse("empty text");
        }
        if (cache != nullptr) cache->Put(request.cache_key, text);
        outcome.result = RewriteResult{request.sample_id, std::move(text), elapsed_ms(),
                                       false, endpoint_id};
        return outcome;
      } catch (const TransportError& e) {
        if (attempt >= options.max_retries) {
          outcome.error_kind = "EndpointUnreachable";
          outcome.error_message = e.what();
          return outcome;
        }
        ++retries;
        std::this_thread::sleep_for(backoff);
        backoff = std::chrono::milliseconds(static_cast<int64_t>(
            static_cast<double>(backoff.count()) * options.backoff_factor));
      } catch (const Error& e) {
        outcome.error_kind = e.kind();
        outcome.error_message = e.what();
        return outcome;
      }
    }
  };

  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      RewriteOutcome outcome;
      try {
        outcome = process(requests[i]);
      } catch (const std::exception& e) {
        outcome = RewriteOutcome{requests[i].sample_id, std::nullopt, "IoError", e.what()};
      }
      deliver(std::move(outcome));
    }
  };

  const size_t workers = std::min(options.max_in_flight, requests.size());
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (consumer_error) std::rethrow_exception(consumer_error);

  stats.cache_hits = cache_hits;
  stats.endpoint_calls = endpoint_calls;
  stats.retries = retries;
  return stats;
}

}  // namespace pfkit
