/* Copyright 2026 The HTMask Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef HTMASK_ERROR_H_
#define HTMASK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace htmask {

// Every failure the library reports carries one of these codes. The CLI
// prints the code name on stderr, so the names are part of the interface.
enum class ErrorCode {
  kInvalidArgument,
  kEmptyMask,
  kParseError,
  kUnknownCategory,
  kScoreOutOfRange,
  kNoClassSamples,
  kDegenerateThreshold,
  kDimensionMismatch,
  kBothEmpty,
  kNoGroundTruth,
  kImageIdMismatch,
  kPlacementInfeasible,
  kIoError,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace htmask

#endif  // HTMASK_ERROR_H_
