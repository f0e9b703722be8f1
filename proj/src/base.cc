// src/base.cc

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

#include "lyralign/base.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace lyralign {

namespace {
std::mutex log_mutex;
std::atomic<bool> quiet{false};
}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kUnsupportedCodec: return "unsupported-codec";
    case ErrorCode::kEmptyPayload: return "empty-payload";
    case ErrorCode::kUnsupportedRate: return "unsupported-rate";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kTooShort: return "too-short";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kUnknownPhone: return "unknown-phone";
    case ErrorCode::kEmptyPronunciation: return "empty-pronunciation";
    case ErrorCode::kOutOfVocabulary: return "out-of-vocabulary";
    case ErrorCode::kNoAdmissiblePath: return "no-admissible-path";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kChecksum: return "checksum";
    case ErrorCode::kWordMismatch: return "word-mismatch";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

void Fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

void LogWarning(const std::string &msg) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "WARNING (lyralign) " << msg << '\n';
}

void LogInfo(const std::string &msg) {
  if (quiet.load()) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "LOG (lyralign) " << msg << '\n';
}

void SetQuiet(bool q) { quiet.store(q); }

}  // namespace lyralign
