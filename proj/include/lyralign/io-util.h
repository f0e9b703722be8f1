// include/lyralign/io-util.h

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

#ifndef LYRALIGN_IO_UTIL_H_
#define LYRALIGN_IO_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace lyralign {

std::string ReadFileToString(const std::string &path);

/// Writes through a temporary file and renames, so readers never observe a
/// half-written artifact.
void WriteStringToFile(const std::string &path, std::string_view content);

bool FileExists(const std::string &path);

/// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

/// First 16 hex digits of the SHA-256; used as the short hash embedded in
/// artifact headers.
std::string ShortHash(std::string_view data);

std::vector<std::string> SplitString(std::string_view s, char delim);
std::vector<std::string> SplitWhitespace(std::string_view s);
std::string_view Trim(std::string_view s);

/// Shortest-round-trip formatting with a fixed significant-digit count.
std::string FormatDouble(double v, int significant_digits);
std::string FormatFloat(float v, int significant_digits);
/// Fewest digits that read back to the same double.
std::string FormatShortest(double v);
/// Fixed-point formatting, e.g. 3 decimals for seconds.
std::string FormatFixed(double v, int decimals);

bool ParseDouble(std::string_view s, double *out);
bool ParseFloat(std::string_view s, float *out);
bool ParseInt(std::string_view s, long long *out);

}  // namespace lyralign

#endif  // LYRALIGN_IO_UTIL_H_
