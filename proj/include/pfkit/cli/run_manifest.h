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

#ifndef PFKIT_CLI_RUN_MANIFEST_H_
#define PFKIT_CLI_RUN_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pfkit/json_io.h"

namespace pfkit {

// Provenance record written next to the outputs of every CLI run. Only the
// timestamps differ between two runs with identical options.
struct RunManifest {
  std::string command;
  std::string config_hash;
  Json options = Json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  Json counts = Json::object();

  Json ToJson() const;
  // Sets config_hash to the SHA-256 of the compact options document.
  void HashOptions();
  void Write(const std::filesystem::path& path) const;
};

// Current UTC time as YYYY-MM-DDTHH:MM:SS.mmmZ.
std::string UtcTimestamp();

// Manifest path for a primary output: "<output>.run.json".
std::filesystem::path ManifestPathFor(const std::filesystem::path& output);

}  // namespace pfkit

#endif  // PFKIT_CLI_RUN_MANIFEST_H_
