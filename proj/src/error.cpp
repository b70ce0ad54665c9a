// Copyright (c) 2026 The psnet Authors
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

#include "psnet/error.hpp"

#include <string>

namespace psnet {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kNonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::kSampleCountTooLarge: return "SampleCountTooLarge";
    case ErrorCode::kGroupSizeTooLarge: return "GroupSizeTooLarge";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedPly: return "UnsupportedPly";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kInsufficientGrid: return "InsufficientGrid";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

NonFiniteCoordinate::NonFiniteCoordinate(std::size_t index)
    : Error(ErrorCode::kNonFiniteCoordinate,
            "non-finite coordinate at point " + std::to_string(index)),
      index_(index) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace psnet
