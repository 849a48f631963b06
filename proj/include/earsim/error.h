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

#ifndef EARSIM_ERROR_H_
#define EARSIM_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace earsim {

// Every failure the library can report. The numeric values double as the
// CLI exit codes and must stay stable.
enum class ErrorCode : int {
  kUsage = 2,
  kFileNotFound = 10,
  kUnsupportedFormat = 11,
  kCorruptHeader = 12,
  kInvalidRate = 13,
  kInvalidRange = 14,
  kInvalidInput = 15,
  kWrongRate = 16,
  kUnstable = 17,
  kBinMismatch = 18,
  kEmptyInput = 19,
  kInvalidPath = 20,
  kChannelMismatch = 21,
  kTooShort = 22,
  kOutOfRange = 23,
  kDegenerateInput = 24,
  kEmptyManifest = 25,
  kAllPairsFailed = 26,
  kManifestParse = 27,
  kIoError = 28,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace earsim

#endif  // EARSIM_ERROR_H_
