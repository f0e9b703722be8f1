// src/feature-matrix.cc

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

#include "lyralign/feature-matrix.h"

#include <cmath>
#include <numeric>

#include "lyralign/io-util.h"

namespace lyralign {

FeatureMatrix::FeatureMatrix(int32 num_frames, std::vector<LayoutEntry> layout)
    : num_frames_(num_frames), layout_(std::move(layout)) {
  if (num_frames < 0) Fail(ErrorCode::kInvalidArgument, "negative frame count");
  dim_ = 0;
  for (const auto &e : layout_) {
    if (e.dim <= 0 || e.group.empty())
      Fail(ErrorCode::kInvalidArgument, "bad layout entry '" + e.group + "'");
    dim_ += e.dim;
  }
  data_.assign(static_cast<size_t>(num_frames_) * dim_, 0.0f);
}

std::string FeatureMatrix::LayoutString() const { return LayoutToString(layout_); }

int32 FeatureMatrix::GroupOffset(std::string_view group) const {
  int32 offset = 0;
  for (const auto &e : layout_) {
    if (e.group == group) return offset;
    offset += e.dim;
  }
  return -1;
}

int32 FeatureMatrix::GroupDim(std::string_view group) const {
  for (const auto &e : layout_)
    if (e.group == group) return e.dim;
  return 0;
}

FeatureMatrix FeatureMatrix::Subsample(int32 factor, int32 offset) const {
  if (factor < 1 || offset < 0)
    Fail(ErrorCode::kInvalidArgument, "bad subsampling factor");
  int32 n = num_frames_ > offset ? (num_frames_ - offset + factor - 1) / factor : 0;
  FeatureMatrix out(n, layout_);
  for (int32 t = 0; t < n; ++t) {
    auto src = Row(offset + t * factor);
    std::copy(src.begin(), src.end(), out.Row(t).begin());
  }
  return out;
}

std::vector<LayoutEntry> ParseLayout(std::string_view text) {
  std::vector<LayoutEntry> layout;
  for (const std::string &item : SplitString(text, ',')) {
    size_t eq = item.find('=');
    long long dim = 0;
    if (eq == std::string::npos || eq == 0 ||
        !ParseInt(std::string_view(item).substr(eq + 1), &dim) || dim <= 0)
      Fail(ErrorCode::kParse, "bad layout item '" + item + "'");
    layout.push_back({item.substr(0, eq), static_cast<int32>(dim)});
  }
  return layout;
}

std::string LayoutToString(const std::vector<LayoutEntry> &layout) {
  std::string s;
  for (size_t i = 0; i < layout.size(); ++i) {
    if (i) s += ',';
    s += layout[i].group + "=" + std::to_string(layout[i].dim);
  }
  return s;
}

std::string WriteLyf(const FeatureMatrix &m) {
  std::string out = "LYF1 " + std::to_string(m.NumFrames()) + " " +
                    std::to_string(m.Dim()) + " " + m.LayoutString() + "\n";
  out.reserve(out.size() + static_cast<size_t>(m.NumFrames()) * m.Dim() * 14);
  for (int32 t = 0; t < m.NumFrames(); ++t) {
    auto row = m.Row(t);
    for (int32 d = 0; d < m.Dim(); ++d) {
      if (d) out += ' ';
      out += FormatFloat(row[d], 9);
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix ReadLyf(std::string_view text) {
  std::vector<std::string> lines = SplitString(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) Fail(ErrorCode::kParse, "LYF1: empty input");
  std::vector<std::string> header = SplitWhitespace(lines[0]);
  if (header.empty() || header[0] != "LYF1")
    Fail(ErrorCode::kVersionMismatch, "LYF1: bad magic");
  long long frames = 0, dim = 0;
  if (header.size() != 4 || !ParseInt(header[1], &frames) ||
      !ParseInt(header[2], &dim) || frames < 0)
    Fail(ErrorCode::kParse, "LYF1 line 1: malformed header");
  FeatureMatrix m(static_cast<int32>(frames), ParseLayout(header[3]));
  if (m.Dim() != dim)
    Fail(ErrorCode::kParse, "LYF1 line 1: layout does not sum to dim");
  if (static_cast<long long>(lines.size()) != frames + 1)
    Fail(ErrorCode::kParse, "LYF1: expected " + std::to_string(frames) +
                                " rows, found " + std::to_string(lines.size() - 1));
  for (int32 t = 0; t < m.NumFrames(); ++t) {
    std::vector<std::string> fields = SplitWhitespace(lines[t + 1]);
    if (static_cast<long long>(fields.size()) != dim)
      Fail(ErrorCode::kParse, "LYF1 line " + std::to_string(t + 2) +
                                  ": wrong number of values");
    for (int32 d = 0; d < m.Dim(); ++d) {
      float v;
      if (!ParseFloat(fields[d], &v) || !std::isfinite(v))
        Fail(ErrorCode::kParse, "LYF1 line " + std::to_string(t + 2) +
                                    ": bad value '" + fields[d] + "'");
      m(t, d) = v;
    }
  }
  return m;
}

void WriteLyfFile(const std::string &path, const FeatureMatrix &m) {
  WriteStringToFile(path, WriteLyf(m));
}

FeatureMatrix ReadLyfFile(const std::string &path) {
  return ReadLyf(ReadFileToString(path));
}

}  // namespace lyralign
