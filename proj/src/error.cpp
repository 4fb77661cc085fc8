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

#include "sbfp/error.hpp"

namespace sbfp {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kNoExitWithinCap:
      return "NoExitWithinCap";
    case ErrorCode::kAllTruncated:
      return "AllTruncated";
    case ErrorCode::kPoleHit:
      return "PoleHit";
    case ErrorCode::kIllConditioned:
      return "IllConditioned";
    case ErrorCode::kDivergent:
      return "Divergent";
    case ErrorCode::kDegenerateDrift:
      return "DegenerateDrift";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kEmptySeries:
      return "EmptySeries";
    case ErrorCode::kTooShort:
      return "TooShort";
    case ErrorCode::kZeroSpan:
      return "ZeroSpan";
    case ErrorCode::kIo:
      return "IoError";
  }
  return "Unknown";
}

}  // namespace sbfp
