// src/io-util.cc

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

#include "lyralign/io-util.h"

#include <openssl/evp.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lyralign/base.h"

namespace lyralign {

std::string ReadFileToString(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) Fail(ErrorCode::kIo, "read error on " + path);
  return ss.str();
}

void WriteStringToFile(const std::string &path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) Fail(ErrorCode::kIo, "cannot open " + tmp + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) Fail(ErrorCode::kIo, "write error on " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot rename " + tmp + ": " + ec.message());
}

bool FileExists(const std::string &path) {
  std::error_code ec;
  return std::filesystem::is_regular_file(path, ec);
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1)
    Fail(ErrorCode::kIo, "SHA-256 failed");
  static const char *hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string ShortHash(std::string_view data) {
  return Sha256Hex(data).substr(0, 16);
}

std::vector<std::string> SplitString(std::string_view s, char delim) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::string FormatDouble(double v, int significant_digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, significant_digits);
  return std::string(buf, res.ptr);
}

std::string FormatFloat(float v, int significant_digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, significant_digits);
  return std::string(buf, res.ptr);
}

std::string FormatFixed(double v, int decimals) {
  char buf[64];
  // -0.000 would otherwise leak into outputs for tiny negative round-off.
  if (v < 0 && v > -0.5 * std::pow(10.0, -decimals)) v = 0.0;
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

std::string FormatShortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool ParseDouble(std::string_view s, double *out) {
  s = Trim(s);
  if (s.empty()) return false;
  if (s == "inf" || s == "+inf") { *out = std::numeric_limits<double>::infinity(); return true; }
  if (s == "-inf") { *out = -std::numeric_limits<double>::infinity(); return true; }
  auto res = std::from_chars(s.data(), s.data() + s.size(), *out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool ParseFloat(std::string_view s, float *out) {
  s = Trim(s);
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), *out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool ParseInt(std::string_view s, long long *out) {
  s = Trim(s);
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), *out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace lyralign
