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

#include "pfkit/json_io.h"

#include <sstream>
#include <system_error>

#include "pfkit/errors.h"

namespace pfkit {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

void ForEachLine(const std::filesystem::path& path,
                 const std::function<void(size_t, std::string_view)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line_number, line);
  }
  if (in.bad()) throw IoError("read failed: " + path.string());
}

Json ParseJson(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

Json ReadJsonFile(const std::filesystem::path& path) {
  return ParseJson(ReadFile(path), path.string());
}

std::string DumpLine(const Json& value) {
  return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot write " + path.string());
}

void JsonlWriter::Write(const Json& value) {
  out_ << DumpLine(value) << '\n';
  if (!out_) throw IoError("write failed: " + path_.string());
  ++count_;
}

void JsonlWriter::Close() {
  out_.close();
  if (!out_) throw IoError("close failed: " + path_.string());
}

const Json& RequireField(const Json& object, std::string_view field) {
  if (!object.is_object()) throw SchemaError(std::string(field), "not an object");
  auto it = object.find(field);
  if (it == object.end() || it->is_null()) {
    throw SchemaError(std::string(field), "missing");
  }
  return *it;
}

std::string RequireString(const Json& object, std::string_view field,
                          bool allow_empty) {
  const Json& value = RequireField(object, field);
  if (!value.is_string()) throw SchemaError(std::string(field), "not a string");
  std::string s = value.get<std::string>();
  if (!allow_empty && s.empty()) throw SchemaError(std::string(field), "empty");
  return s;
}

int64_t RequireInt(const Json& object, std::string_view field) {
  const Json& value = RequireField(object, field);
  if (value.is_number_integer()) return value.get<int64_t>();
  if (value.is_number_float()) {
    double d = value.get<double>();
    if (d == static_cast<double>(static_cast<int64_t>(d))) {
      return static_cast<int64_t>(d);
    }
  }
  throw SchemaError(std::string(field), "not an integer");
}

double RequireNumber(const Json& object, std::string_view field) {
  const Json& value = RequireField(object, field);
  if (!value.is_number()) throw SchemaError(std::string(field), "not a number");
  return value.get<double>();
}

}  // namespace pfkit
