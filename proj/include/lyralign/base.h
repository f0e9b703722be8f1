// include/lyralign/base.h

// Copyright 2026  lyralign authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef LYRALIGN_BASE_H_
#define LYRALIGN_BASE_H_

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lyralign {

typedef std::int32_t int32;
typedef std::int64_t int64;

/// Every failure raised by the library carries one of these codes, so callers
/// can route errors without parsing messages.
enum class ErrorCode {
  kMalformedHeader,
  kUnsupportedCodec,
  kEmptyPayload,
  kUnsupportedRate,
  kInvalidArgument,
  kTooShort,
  kDimensionMismatch,
  kParse,
  kUnknownPhone,
  kEmptyPronunciation,
  kOutOfVocabulary,
  kNoAdmissiblePath,
  kVersionMismatch,
  kTruncated,
  kChecksum,
  kWordMismatch,
  kEmptyInput,
  kIo,
  kConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) { }
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string &what);

/// Writes "WARNING (lyralign) <msg>" to stderr.
void LogWarning(const std::string &msg);
void LogInfo(const std::string &msg);
/// Suppresses LogInfo output (warnings still print).
void SetQuiet(bool quiet);

constexpr double kLogZero = -std::numeric_limits<double>::infinity();
constexpr double kCanonicalRateHz = 16000.0;

}  // namespace lyralign

#endif  // LYRALIGN_BASE_H_
