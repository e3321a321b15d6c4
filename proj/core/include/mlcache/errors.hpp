// Copyright 2026 The mlcache Authors
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mlcache {

enum class ParseErrorKind {
  kMalformedJson,
  kMissingField,
  kNonPositive,
  kDegreeExceedsCaches,
  kUserCountMismatch,
  kInvalidValue,
};

// Raised while reading a spec or a data file. `field()` names the JSON path or
// CSV column that was rejected.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        kind_(kind),
        field_(std::move(field)) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ParseErrorKind kind_;
  std::string field_;
};

enum class ModelErrorKind {
  kInvalidParameters,
  kUnsupportedGeometry,
  kOutOfModel,
  kWrongSetup,
  kInfeasible,
};

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ModelErrorKind kind() const noexcept { return kind_; }

 private:
  ModelErrorKind kind_;
};

// A file could not be opened or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A user could not reconstruct its requested file. Carries the witness.
class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::size_t user, std::int64_t bit, const std::string& message)
      : std::runtime_error(message), user_(user), bit_(bit) {}

  std::size_t user() const noexcept { return user_; }
  std::int64_t bit() const noexcept { return bit_; }

 private:
  std::size_t user_;
  std::int64_t bit_;
};

}  // namespace mlcache
