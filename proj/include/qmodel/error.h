// Copyright 2026 The qmodel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QMODEL_ERROR_H_
#define QMODEL_ERROR_H_

#include <stdexcept>
#include <string>

namespace qmodel {

/// Broad failure classes. The CLI maps each to a process exit code.
enum class ErrorCategory {
  kConfig = 2,
  kData = 3,
  kNumeric = 4,
  kIo = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

/// Shape or precondition violation on a function argument.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCategory::kConfig, what) {}
};

/// NaN/Inf inputs or an out-of-domain numeric value.
class NumericDomainError : public Error {
 public:
  explicit NumericDomainError(const std::string& what) : Error(ErrorCategory::kNumeric, what) {}
};

/// A physical invariant (trace, Hermiticity, positivity, population range) failed.
class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error(ErrorCategory::kNumeric, what) {}
};

/// Non-finite loss during optimisation.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch)
      : Error(ErrorCategory::kNumeric, what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

/// Malformed dataset, checkpoint or config content.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCategory::kData, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

}  // namespace qmodel

#endif  // QMODEL_ERROR_H_
