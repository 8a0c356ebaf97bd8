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

#ifndef PFKIT_DISTORTION_COMMAND_POOL_H_
#define PFKIT_DISTORTION_COMMAND_POOL_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pfkit {

inline constexpr size_t kCommandPoolSize = 24;
// SHA-256 of data/distortion_commands.txt (one command per line, LF-terminated).
inline constexpr std::string_view kCommandPoolSha256 =
    "44cb205687fca516f3fd92d72368ec1063dcf55f43fb733e7af9e947a21cca84";

// The distortion commands an LLM may be asked to apply on top of the plain
// "make it worse" request. The contents are pinned by hash.
class CommandPool {
 public:
  // Throws IoError, or BadConfig when the file has the wrong entry count or
  // does not match kCommandPoolSha256.
  static CommandPool Load(const std::filesystem::path& path);
  static CommandPool FromText(std::string_view text);
  // Compiled-in copy of the golden file.
  static const CommandPool& Builtin();

  const std::vector<std::string>& commands() const { return commands_; }
  size_t size() const { return commands_.size(); }
  const std::string& at(size_t index) const { return commands_.at(index); }

 private:
  std::vector<std::string> commands_;
};

}  // namespace pfkit

#endif  // PFKIT_DISTORTION_COMMAND_POOL_H_
