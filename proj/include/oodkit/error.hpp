/*
 * Copyright 2026 The oodkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace oodkit {

enum class ErrorKind {
  kMalformedHeader,
  kDimensionMismatch,
  kNonFinite,
  kLabelOutOfRange,
  kMissingLabels,
  kInvalidArgument,
  kIo,
  kNumerical,
  kNotFound,
  kConflict,
};

const char* ErrorKindName(ErrorKind kind);

// Every failure raised by the library. Input-shaped kinds map to CLI exit
// code 2, numerical failures to 3.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return kind_ == ErrorKind::kNumerical ? 3 : 2; }

 private:
  ErrorKind kind_;
};

}  // namespace oodkit
