// Copyright 2026 The Earsim Authors. All Rights Reserved.
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

#include "earsim/error.h"

#include <string_view>

namespace earsim {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return "Usage";
    case ErrorCode::kFileNotFound:
      return "FileNotFound";
    case ErrorCode::kUnsupportedFormat:
      return "UnsupportedFormat";
    case ErrorCode::kCorruptHeader:
      return "CorruptHeader";
    case ErrorCode::kInvalidRate:
      return "InvalidRate";
    case ErrorCode::kInvalidRange:
      return "InvalidRange";
    case ErrorCode::kInvalidInput:
      return "InvalidInput";
    case ErrorCode::kWrongRate:
      return "WrongRate";
    case ErrorCode::kUnstable:
      return "Unstable";
    case ErrorCode::kBinMismatch:
      return "BinMismatch";
    case ErrorCode::kEmptyInput:
      return "EmptyInput";
    case ErrorCode::kInvalidPath:
      return "InvalidPath";
    case ErrorCode::kChannelMismatch:
      return "ChannelMismatch";
    case ErrorCode::kTooShort:
      return "TooShort";
    case ErrorCode::kOutOfRange:
      return "OutOfRange";
    case ErrorCode::kDegenerateInput:
      return "DegenerateInput";
    case ErrorCode::kEmptyManifest:
      return "EmptyManifest";
    case ErrorCode::kAllPairsFailed:
      return "AllPairsFailed";
    case ErrorCode::kManifestParse:
      return "ManifestParse";
    case ErrorCode::kIoError:
      return "IoError";
  }
  return "Unknown";
}

}  // namespace earsim
