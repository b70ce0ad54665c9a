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

#ifndef PSNET_ERROR_HPP_
#define PSNET_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace psnet {

enum class ErrorCode {
  kEmptyCloud,
  kNonFiniteCoordinate,
  kSampleCountTooLarge,
  kGroupSizeTooLarge,
  kShapeMismatch,
  kInvalidArgument,
  kParseError,
  kUnsupportedPly,
  kConfigMismatch,
  kInsufficientGrid,
  kNonFiniteLoss,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library. The code is stable and machine
/// readable; the message carries context (offending index, line number...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// NonFiniteCoordinate carries the index of the first offending point.
class NonFiniteCoordinate : public Error {
 public:
  explicit NonFiniteCoordinate(std::size_t index);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// ParseError carries the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace psnet

#endif  // PSNET_ERROR_HPP_
