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

#ifndef PFKIT_ERRORS_H_
#define PFKIT_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace pfkit {

// Errors fall in two classes: bad input/config (the caller can fix the data)
// and environment failures (files, endpoints, scorers). The CLI maps the
// first to exit status 1 and the second to exit status 2.
enum class ErrorClass { kValidation, kEnvironment };

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message, ErrorClass error_class)
      : std::runtime_error(kind + ": " + message),
        kind_(std::move(kind)),
        error_class_(error_class) {}

  // Short name of the error, e.g. "SchemaError".
  const std::string& kind() const { return kind_; }
  ErrorClass error_class() const { return error_class_; }

 private:
  std::string kind_;
  ErrorClass error_class_;
};

namespace internal {

template <ErrorClass kClass>
class ErrorOfClass : public Error {
 public:
  ErrorOfClass(std::string kind, const std::string& message)
      : Error(std::move(kind), message, kClass) {}
};

}  // namespace internal

using ValidationError = internal::ErrorOfClass<ErrorClass::kValidation>;
using EnvironmentError = internal::ErrorOfClass<ErrorClass::kEnvironment>;

// A required field of a record is missing, empty or has the wrong type.
class SchemaError : public ValidationError {
 public:
  explicit SchemaError(std::string field, const std::string& detail = "")
      : ValidationError("SchemaError",
                        detail.empty() ? field : field + " (" + detail + ")"),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class UnknownAdapter : public ValidationError {
 public:
  explicit UnknownAdapter(const std::string& name)
      : ValidationError("UnknownAdapter", name) {}
};

// Region geometry invalid or outside the image.
class OutOfBounds : public ValidationError {
 public:
  explicit OutOfBounds(const std::string& message)
      : ValidationError("OutOfBounds", message) {}
};

class DecodeError : public ValidationError {
 public:
  explicit DecodeError(const std::string& message)
      : ValidationError("DecodeError", message) {}
};

class BadConfig : public ValidationError {
 public:
  explicit BadConfig(const std::string& message)
      : ValidationError("BadConfig", message) {}
};

class ParseError : public ValidationError {
 public:
  explicit ParseError(const std::string& message)
      : ValidationError("ParseError", message) {}
};

class EmptyResponse : public ValidationError {
 public:
  explicit EmptyResponse(const std::string& sample_id)
      : ValidationError("EmptyResponse", sample_id) {}
};

class EmptyInput : public ValidationError {
 public:
  explicit EmptyInput(const std::string& message)
      : ValidationError("EmptyInput", message) {}
};

class InsufficientSource : public ValidationError {
 public:
  InsufficientSource(std::string source, int64_t shortfall)
      : ValidationError("InsufficientSource",
                        source + " short by " + std::to_string(shortfall)),
        source_(std::move(source)),
        shortfall_(shortfall) {}
  const std::string& source() const { return source_; }
  int64_t shortfall() const { return shortfall_; }

 private:
  std::string source_;
  int64_t shortfall_;
};

class MissingRawAnnotation : public ValidationError {
 public:
  explicit MissingRawAnnotation(const std::string& sample_id)
      : ValidationError("MissingRawAnnotation", sample_id) {}
};

class BudgetTooSmall : public ValidationError {
 public:
  explicit BudgetTooSmall(const std::string& message)
      : ValidationError("BudgetTooSmall", message) {}
};

class MarkerNotFound : public ValidationError {
 public:
  explicit MarkerNotFound(const std::string& message)
      : ValidationError("MarkerNotFound", message) {}
};

class InvalidOverride : public ValidationError {
 public:
  explicit InvalidOverride(const std::string& message)
      : ValidationError("InvalidOverride", message) {}
};

class EmptyCorpus : public ValidationError {
 public:
  explicit EmptyCorpus(const std::string& message)
      : ValidationError("EmptyCorpus", message) {}
};

class TaskMismatch : public ValidationError {
 public:
  explicit TaskMismatch(const std::string& message)
      : ValidationError("TaskMismatch", message) {}
};

class MissingScore : public ValidationError {
 public:
  explicit MissingScore(const std::string& message)
      : ValidationError("MissingScore", message) {}
};

class EmptyPairSet : public ValidationError {
 public:
  explicit EmptyPairSet(const std::string& message)
      : ValidationError("EmptyPairSet", message) {}
};

class IoError : public EnvironmentError {
 public:
  explicit IoError(const std::string& message)
      : EnvironmentError("IoError", message) {}
};

class EndpointUnreachable : public EnvironmentError {
 public:
  explicit EndpointUnreachable(const std::string& message)
      : EnvironmentError("EndpointUnreachable", message) {}
};

class MalformedResponse : public EnvironmentError {
 public:
  explicit MalformedResponse(const std::string& message)
      : EnvironmentError("MalformedResponse", message) {}
};

class ScorerUnavailable : public EnvironmentError {
 public:
  explicit ScorerUnavailable(const std::string& message)
      : EnvironmentError("ScorerUnavailable", message) {}
};

}  // namespace pfkit

#endif  // PFKIT_ERRORS_H_
