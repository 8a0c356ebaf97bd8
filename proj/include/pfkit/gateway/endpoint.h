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

#ifndef PFKIT_GATEWAY_ENDPOINT_H_
#define PFKIT_GATEWAY_ENDPOINT_H_

#include <string>
#include <vector>

#include "pfkit/errors.h"
#include "pfkit/json_io.h"

namespace pfkit {

struct GenerateCall {
  std::string prompt;
  std::vector<std::string> images;
  int max_new_tokens = 512;
};

// Connection-level failure; the only error class the batch driver retries.
class TransportError : public EnvironmentError {
 public:
  explicit TransportError(const std::string& message)
      : EnvironmentError("TransportError", message) {}
};

// Abstract completion service: prompt plus image URIs in, text out.
// Implementations throw TransportError or MalformedResponse.
class GenerationEndpoint {
 public:
  virtual ~GenerationEndpoint() = default;
  virtual std::string id() const = 0;
  virtual std::string Generate(const GenerateCall& call) = 0;
};

// POST {base_url}/generate with {"prompt", "images", "max_new_tokens"},
// expecting {"text": str}. 5xx and connection failures are transport
// errors; anything else unexpected is a MalformedResponse.
class HttpGenerationEndpoint : public GenerationEndpoint {
 public:
  explicit HttpGenerationEndpoint(std::string base_url, std::string bearer_token = "",
                                  int timeout_seconds = 120);

  std::string id() const override { return base_url_; }
  std::string Generate(const GenerateCall& call) override;

 private:
  std::string base_url_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::string bearer_token_;
  int timeout_seconds_;
};

Json GenerateRequestJson(const GenerateCall& call);
// Throws MalformedResponse unless the body is {"text": non-empty string}.
std::string ParseGenerateResponse(const std::string& body);

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> SplitBaseUrl(const std::string& url);

}  // namespace pfkit

#endif  // PFKIT_GATEWAY_ENDPOINT_H_
