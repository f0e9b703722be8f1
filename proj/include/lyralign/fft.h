// include/lyralign/fft.h

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

#ifndef LYRALIGN_FFT_H_
#define LYRALIGN_FFT_H_

#include <complex>
#include <vector>

#include "lyralign/base.h"

namespace lyralign {

/// Radix-2 complex FFT with precomputed twiddles.  Size must be a power of
/// two.  Immutable after construction, so one instance can be shared.
class Fft {
 public:
  explicit Fft(int32 size);
  int32 Size() const { return size_; }
  /// Forward transform in place (no scaling).
  void Forward(std::vector<std::complex<double>> *data) const;

 private:
  int32 size_;
  std::vector<int32> bitrev_;
  std::vector<std::complex<double>> twiddles_;
};

bool IsPowerOfTwo(int32 n);

}  // namespace lyralign

#endif  // LYRALIGN_FFT_H_
