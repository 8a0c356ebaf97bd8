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

#include "pfkit/corpus/corpus_io.h"

#include <unordered_map>

#include "pfkit/errors.h"

namespace pfkit {

std::vector<InstructionSample> ReadCorpus(const std::filesystem::path& path) {
  std::vector<InstructionSample> samples;
  ForEachLine(path, [&](size_t line_number, std::string_view line) {
    const std::string where = path.string() + ":" + std::to_string(line_number);
    try {
      samples.push_back(SampleFromJson(ParseJson(line, where)));
    } catch (const SchemaError& e) {
      throw SchemaError(e.field(), "at " + where);
    }
  });
  return samples;
}

void WriteCorpus(const std::filesystem::path& path,
                 const std::vector<InstructionSample>& samples) {
  JsonlWriter writer(path);
  for (const auto& s : samples) writer.Write(ToJson(s));
  writer.Close();
}

Json ValidationReport::ToJson() const {
  Json j;
  j["valid"] = valid;
  Json errs = Json::array();
  for (const auto& e : errors) {
    errs.push_back(Json{{"line", e.line}, {"error", e.message}});
  }
  j["errors"] = std::move(errs);
  return j;
}

ValidationReport ValidateCorpus(const std::filesystem::path& path) {
  ValidationReport report;
  std::unordered_map<std::string, size_t> first_seen;
  ForEachLine(path, [&](size_t line_number, std::string_view line) {
    InstructionSample sample;
    try {
      sample = SampleFromJson(ParseJson(line, "line"));
    } catch (const Error& e) {
      report.errors.push_back({line_number, e.what()});
      return;
    } catch (const nlohmann::json::exception& e) {
      report.errors.push_back({line_number, std::string("SchemaError: ") + e.what()});
      return;
    }
    std::vector<std::string> problems = CheckSample(sample);
    auto [it, inserted] = first_seen.emplace(sample.id, line_number);
    if (!inserted) {
      problems.push_back("duplicate id '" + sample.id + "' (first seen at line " +
                         std::to_string(it->second) + ")");
    }
    if (problems.empty()) {
      ++report.valid;
    } else {
      for (auto& p : problems) report.errors.push_back({line_number, std::move(p)});
    }
  });
  return report;
}

}  // namespace pfkit
