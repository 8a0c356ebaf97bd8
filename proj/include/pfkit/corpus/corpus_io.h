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

#ifndef PFKIT_CORPUS_CORPUS_IO_H_
#define PFKIT_CORPUS_CORPUS_IO_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pfkit/corpus/sample.h"
#include "pfkit/json_io.h"

namespace pfkit {

// Reads a JSONL corpus. Throws ParseError/SchemaError prefixed with the line
// number on the first bad line.
std::vector<InstructionSample> ReadCorpus(const std::filesystem::path& path);

void WriteCorpus(const std::filesystem::path& path,
                 const std::vector<InstructionSample>& samples);

struct LineError {
  size_t line = 0;
  std::string message;
};

struct ValidationReport {
  size_t valid = 0;
  std::vector<LineError> errors;

  bool ok() const { return errors.empty(); }
  Json ToJson() const;
};

// Never modifies the file. Throws IoError if it cannot be read.
ValidationReport ValidateCorpus(const std::filesystem::path& path);

}  // namespace pfkit

#endif  // PFKIT_CORPUS_CORPUS_IO_H_
