// include/lyralign/feature-matrix.h

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

#ifndef LYRALIGN_FEATURE_MATRIX_H_
#define LYRALIGN_FEATURE_MATRIX_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lyralign/base.h"

namespace lyralign {

struct LayoutEntry {
  std::string group;
  int32 dim = 0;
  bool operator==(const LayoutEntry &other) const = default;
};

/// Frames x dims matrix of single-precision features plus a named block
/// layout, e.g. "MFCC=40,A=52,V=12".  Single precision keeps the 9-digit
/// text format exactly reversible.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  /// Zero-filled matrix.  Throws kInvalidArgument on a non-positive dim.
  FeatureMatrix(int32 num_frames, std::vector<LayoutEntry> layout);

  int32 NumFrames() const { return num_frames_; }
  int32 Dim() const { return dim_; }
  const std::vector<LayoutEntry> &Layout() const { return layout_; }
  std::string LayoutString() const;
  /// Column offset of `group`, or -1.
  int32 GroupOffset(std::string_view group) const;
  int32 GroupDim(std::string_view group) const;

  float operator()(int32 t, int32 d) const { return data_[t * dim_ + d]; }
  float &operator()(int32 t, int32 d) { return data_[t * dim_ + d]; }
  std::span<const float> Row(int32 t) const {
    return {data_.data() + static_cast<size_t>(t) * dim_, static_cast<size_t>(dim_)};
  }
  std::span<float> Row(int32 t) {
    return {data_.data() + static_cast<size_t>(t) * dim_, static_cast<size_t>(dim_)};
  }
  const std::vector<float> &Data() const { return data_; }

  /// Keeps every `factor`-th frame starting at `offset`.
  FeatureMatrix Subsample(int32 factor, int32 offset = 0) const;

  bool operator==(const FeatureMatrix &other) const = default;

 private:
  int32 num_frames_ = 0;
  int32 dim_ = 0;
  std::vector<LayoutEntry> layout_;
  std::vector<float> data_;
};

/// Parses "MFCC=39,A=52".
std::vector<LayoutEntry> ParseLayout(std::string_view text);
std::string LayoutToString(const std::vector<LayoutEntry> &layout);

/// "LYF1 <frames> <dim> <layout>\n" then one row per frame, values with 9
/// significant digits separated by single spaces.
std::string WriteLyf(const FeatureMatrix &m);
/// Throws kParse (with line number) or kVersionMismatch.
FeatureMatrix ReadLyf(std::string_view text);

void WriteLyfFile(const std::string &path, const FeatureMatrix &m);
FeatureMatrix ReadLyfFile(const std::string &path);

}  // namespace lyralign

#endif  // LYRALIGN_FEATURE_MATRIX_H_
