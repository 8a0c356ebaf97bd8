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

#include "pfkit/gateway/endpoint.h"

#include "httplib.h"

namespace pfkit {

std::pair<std::string, std::string> SplitBaseUrl(const std::string& url) {
  const size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw BadConfig("endpoint url needs a scheme: " + url);
  }
  const size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path), prefix};
}

Json GenerateRequestJson(const GenerateCall& call) {
  Json body;
  body["prompt"] = call.prompt;
  body["images"] = call.images;
  body["max_new_tokens"] = call.max_new_tokens;
  return body;
}

std::string ParseGenerateResponse(const std::string& body) {
  Json json;
  try {
    json = Json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw MalformedResponse("response is not JSON");
  }
  if (!json.is_object()) throw MalformedResponse("response is not an object");
  auto it = json.find("text");
  if (it == json.end() || !it->is_string()) {
    throw MalformedResponse("response lacks a string 'text'");
  }
  std::string text = it->get<std::string>();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw MalformedResponse("empty text");
  }
  return text;
}

HttpGenerationEndpoint::HttpGenerationEndpoint(std::string base_url,
                                               std::string bearer_token,
                                               int timeout_seconds)
    : base_url_(std::move(base_url)),
      bearer_token_(std::move(bearer_token)),
      timeout_seconds_(timeout_seconds) {
  std::tie(scheme_host_port_, path_prefix_) = SplitBaseUrl(base_url_);
}

std::string HttpGenerationEndpoint::Generate(const GenerateCall& call) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);
  client.set_write_timeout(timeout_seconds_, 0);
  if (!bearer_token_.empty()) client.set_bearer_token_auth(bearer_token_);
  auto res = client.Post(path_prefix_ + "/generate", DumpLine(GenerateRequestJson(call)),
                         "application/json");
  if (!res) {
    throw TransportError(base_url_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status >= 500) {
    throw TransportError(base_url_ + ": HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw MalformedResponse(base_url_ + ": HTTP " + std::to_string(res->status));
  }
  return ParseGenerateResponse(res->body);
}

}  // namespace pfkit
