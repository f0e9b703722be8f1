// include/lyralign/audio.h

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

#ifndef LYRALIGN_AUDIO_H_
#define LYRALIGN_AUDIO_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lyralign/base.h"

namespace lyralign {

/// Mono PCM audio. Samples are in [-1, 1] after decoding.
struct AudioBuffer {
  std::vector<double> samples;
  int32 sample_rate_hz = 16000;

  double DurationSec() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  bool operator==(const AudioBuffer &other) const = default;
};

/// Decodes a RIFF/WAVE PCM16 container with 1 or 2 channels.  Stereo is
/// downmixed by averaging; integer samples are scaled by 1/32768.
/// Throws Error with kMalformedHeader, kUnsupportedCodec or kEmptyPayload.
AudioBuffer DecodeWav(std::span<const std::uint8_t> bytes);
AudioBuffer ReadWavFile(const std::string &path);

/// Mono PCM16 WAV.  Samples are rounded to the nearest multiple of 1/32768
/// and saturated to the int16 range.
std::vector<std::uint8_t> EncodeWav(const AudioBuffer &buf);
void WriteWavFile(const std::string &path, const AudioBuffer &buf);

bool IsSupportedRate(int32 rate_hz);

/// Linear-interpolation resampling (no anti-alias filter).  Output length is
/// round(len * target / source).  Equal rates return the input unchanged.
AudioBuffer Resample(const AudioBuffer &buf, int32 target_hz);

/// Speed perturbation as resampling with the original rate label kept: tempo
/// and pitch both scale by `factor`, duration becomes duration / factor.
AudioBuffer SpeedPerturb(const AudioBuffer &buf, double factor);

/// Resamples to 16 kHz if needed.
AudioBuffer Canonicalize(const AudioBuffer &buf);

}  // namespace lyralign

#endif  // LYRALIGN_AUDIO_H_
