// include/lyralign/signal.h

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

#ifndef LYRALIGN_SIGNAL_H_
#define LYRALIGN_SIGNAL_H_

#include <span>
#include <vector>

#include "lyralign/audio.h"
#include "lyralign/fft.h"

namespace lyralign {

/// A sequence of per-frame vectors, outer index = frame.
typedef std::vector<std::vector<double>> FrameSeq;

struct FrameSpec {
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int32 fft_size = 512;

  int32 WindowSamples(int32 rate_hz) const;
  int32 HopSamples(int32 rate_hz) const;
  /// Throws kInvalidArgument unless hop <= window and the FFT holds a window.
  void Validate(int32 rate_hz) const;
};

/// 1 + floor((n - win) / hop), or 0 when the signal is shorter than a window.
int32 NumFrames(size_t num_samples, const FrameSpec &spec, int32 rate_hz);

/// Symmetric Hamming window, 0.54 - 0.46 cos(2 pi n / (N - 1)).
std::vector<double> HammingWindow(int32 length);

/// Unwindowed frames; the trailing partial window is dropped.
FrameSeq ExtractFrames(const AudioBuffer &buf, const FrameSpec &spec);

/// ExtractFrames followed by the Hamming window.  Throws kTooShort when the
/// buffer does not hold a single window.
FrameSeq FrameAndWindow(const AudioBuffer &buf, const FrameSpec &spec);

/// |FFT|^2 of the zero-padded frame, bins 0 .. N/2.
std::vector<double> PowerSpectrum(std::span<const double> frame, const Fft &fft);
std::vector<double> PowerSpectrum(std::span<const double> frame, int32 fft_size);

/// Log-energy floor applied after the filterbank.
constexpr double kMelEnergyFloor = 1e-10;

/// Triangular filters equally spaced on the mel scale
/// (mel = 1127 ln(1 + f / 700)); weights are evaluated in the mel domain.
class MelBanks {
 public:
  MelBanks(int32 num_bands, int32 fft_size, double sample_rate_hz,
           double low_hz = 0.0, double high_hz = -1.0);

  static double MelScale(double hz);
  static double InverseMelScale(double mel);

  int32 NumBands() const { return static_cast<int32>(offsets_.size()); }
  int32 NumBins() const { return num_bins_; }
  double BinHz(int32 bin) const { return bin * bin_hz_; }
  double LeftMel(int32 band) const { return edges_mel_[band]; }
  double CenterMel(int32 band) const { return edges_mel_[band + 1]; }
  double RightMel(int32 band) const { return edges_mel_[band + 2]; }
  /// Weight of `bin` in `band`; zero outside the filter support.
  double Weight(int32 band, int32 bin) const;

  /// Linear filterbank energies.
  std::vector<double> Apply(std::span<const double> power) const;
  /// log(max(energy, kMelEnergyFloor)).
  std::vector<double> LogApply(std::span<const double> power) const;

 private:
  int32 num_bins_;
  double bin_hz_;
  std::vector<double> edges_mel_;
  std::vector<int32> offsets_;
  std::vector<std::vector<double>> weights_;
};

/// Orthonormal DCT-II keeping the first `num_out` coefficients (c0 kept).
/// Throws kInvalidArgument if num_out exceeds the input length.
std::vector<double> Dct(std::span<const double> input, int32 num_out);

/// Regression deltas, d_t = sum_n n (c_{t+n} - c_{t-n}) / (2 sum_n n^2), with
/// the sequence edges replicated.
FrameSeq ComputeDeltas(const FrameSeq &seq, int32 window = 2);

}  // namespace lyralign

#endif  // LYRALIGN_SIGNAL_H_
