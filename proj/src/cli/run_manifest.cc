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

#include "pfkit/cli/run_manifest.h"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "pfkit/hashing.h"

namespace pfkit {

Json RunManifest::ToJson() const {
  Json json;
  json["command"] = command;
  json["config_hash"] = config_hash;
  json["options"] = options;
  json["inputs"] = inputs;
  json["outputs"] = outputs;
  json["seed"] = seed;
  json["started_at"] = started_at;
  json["finished_at"] = finished_at;
  json["counts"] = counts;
  return json;
}

void RunManifest::HashOptions() { config_hash = Sha256Hex(DumpLine(options)); }

void RunManifest::Write(const std::filesystem::path& path) const {
  WriteFileAtomic(path, ToJson().dump(2) + "\n");
}

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

std::filesystem::path ManifestPathFor(const std::filesystem::path& output) {
  std::filesystem::path path = output;
  path += ".run.json";
  return path;
}

}  // namespace pfkit
