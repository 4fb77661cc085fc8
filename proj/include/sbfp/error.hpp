// Copyright 2026 The SBFP Authors
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

#ifndef SBFP_ERROR_HPP_
#define SBFP_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbfp {

enum class ErrorCode {
  kInvalidArgument,
  kNoExitWithinCap,
  kAllTruncated,
  kPoleHit,
  kIllConditioned,
  kDivergent,
  kDegenerateDrift,
  kParseError,
  kEmptySeries,
  kTooShort,
  kZeroSpan,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this type; callers that need to
// branch on the failure inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// CSV failures carry the 1-based line and column of the offending field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ", column " +
                  std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace sbfp

#endif  // SBFP_ERROR_HPP_
