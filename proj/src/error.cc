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
#include "htmask/error.h"

namespace htmask {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kEmptyMask:
      return "EmptyMask";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kUnknownCategory:
      return "UnknownCategory";
    case ErrorCode::kScoreOutOfRange:
      return "ScoreOutOfRange";
    case ErrorCode::kNoClassSamples:
      return "NoClassSamples";
    case ErrorCode::kDegenerateThreshold:
      return "DegenerateThreshold";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kBothEmpty:
      return "BothEmpty";
    case ErrorCode::kNoGroundTruth:
      return "NoGroundTruth";
    case ErrorCode::kImageIdMismatch:
      return "ImageIdMismatch";
    case ErrorCode::kPlacementInfeasible:
      return "PlacementInfeasible";
    case ErrorCode::kIoError:
      return "IoError";
    case ErrorCode::kConfigError:
      return "ConfigError";
  }
  return "Unknown";
}

}  // namespace htmask
