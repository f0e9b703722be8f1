// src/fft.cc

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

#include "lyralign/fft.h"

#include <cmath>
#include <numbers>
#include <utility>

namespace lyralign {

bool IsPowerOfTwo(int32 n) { return n > 0 && (n & (n - 1)) == 0; }

Fft::Fft(int32 size) : size_(size) {
  if (!IsPowerOfTwo(size))
    Fail(ErrorCode::kInvalidArgument,
         "FFT size must be a power of two, got " + std::to_string(size));
  int32 bits = 0;
  while ((1 << bits) < size) ++bits;
  bitrev_.resize(size);
  for (int32 i = 0; i < size; ++i) {
    int32 r = 0;
    for (int32 b = 0; b < bits; ++b)
      if (i & (1 << b)) r |= 1 << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddles_.resize(size / 2);
  for (int32 k = 0; k < size / 2; ++k) {
    double angle = -2.0 * std::numbers::pi * k / size;
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void Fft::Forward(std::vector<std::complex<double>> *data) const {
  std::vector<std::complex<double>> &x = *data;
  if (static_cast<int32>(x.size()) != size_)
    Fail(ErrorCode::kDimensionMismatch, "FFT input has wrong length");
  for (int32 i = 0; i < size_; ++i)
    if (i < bitrev_[i]) std::swap(x[i], x[bitrev_[i]]);
  for (int32 len = 2; len <= size_; len <<= 1) {
    int32 half = len / 2, stride = size_ / len;
    for (int32 start = 0; start < size_; start += len) {
      for (int32 k = 0; k < half; ++k) {
        std::complex<double> t = twiddles_[k * stride] * x[start + k + half];
        x[start + k + half] = x[start + k] - t;
        x[start + k] += t;
      }
    }
  }
}

}  // namespace lyralign
