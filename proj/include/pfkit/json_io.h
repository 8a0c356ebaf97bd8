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

#ifndef PFKIT_JSON_IO_H_
#define PFKIT_JSON_IO_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pfkit {

// Insertion-ordered JSON so emitted documents keep a stable field order.
using Json = nlohmann::ordered_json;

std::string ReadFile(const std::filesystem::path& path);

// Writes through a temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

// Calls `fn(line_number, line)` for every non-blank line (1-based numbers).
void ForEachLine(const std::filesystem::path& path,
                 const std::function<void(size_t, std::string_view)>& fn);

Json ParseJson(std::string_view text, std::string_view what);
Json ReadJsonFile(const std::filesystem::path& path);

// Compact single-line serialization used for every JSONL record.
std::string DumpLine(const Json& value);

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void Write(const Json& value);
  void Close();
  size_t count() const { return count_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  size_t count_ = 0;
};

// Typed field access that raises SchemaError naming the field.
const Json& RequireField(const Json& object, std::string_view field);
std::string RequireString(const Json& object, std::string_view field,
                          bool allow_empty = false);
int64_t RequireInt(const Json& object, std::string_view field);
double RequireNumber(const Json& object, std::string_view field);

}  // namespace pfkit

#endif  // PFKIT_JSON_IO_H_
