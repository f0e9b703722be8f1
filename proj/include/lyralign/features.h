// include/lyralign/features.h

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

#ifndef LYRALIGN_FEATURES_H_
#define LYRALIGN_FEATURES_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lyralign/audio.h"
#include "lyralign/feature-matrix.h"
#include "lyralign/signal.h"

namespace lyralign {

// Group ids used in layouts.
inline constexpr std::string_view kGroupMfcc = "MFCC";
inline constexpr std::string_view kGroupAuditory = "A";
inline constexpr std::string_view kGroupEnergy = "E";
inline constexpr std::string_view kGroupChroma = "C";
inline constexpr std::string_view kGroupSpectral = "S";
inline constexpr std::string_view kGroupVoicing = "V";

constexpr int32 kNumMelBands = 26;
constexpr int32 kNumCeps = 13;
constexpr int32 kMfccGmmDim = 39;   // 13 + deltas + delta-deltas
constexpr int32 kMfccNnDim = 40;    // 40 cepstra from 40 high-resolution bands
constexpr int32 kAuditoryDim = 52;  // 26 + deltas
constexpr int32 kEnergyGroupDim = 8;
constexpr int32 kChromaGroupDim = 12;
constexpr int32 kSpectralGroupDim = 30;
constexpr int32 kVoicingGroupDim = 12;

enum class MfccVariant {
  kAuto,   // 39 when no LLD group is selected, otherwise 40
  kGmm39,
  kNn40,
};

struct FeatureConfig {
  bool auditory = false;
  bool energy = false;
  bool chroma = false;
  bool spectral = false;
  bool voicing = false;
  MfccVariant mfcc = MfccVariant::kAuto;
  int32 delta_window = 2;
  /// Per-utterance mean/variance normalisation of the MFCC block only.
  bool cmvn = true;
  FrameSpec frame;

  /// C1, C2, C2-A, C2-E, C2-C, C2-S, C2-V.
  static FeatureConfig FromPreset(std::string_view name);
  /// Comma-separated group ids, e.g. "MFCC,A,V".  MFCC is implied.
  static FeatureConfig FromGroups(std::string_view groups);

  bool HasLld() const { return auditory || energy || chroma || spectral || voicing; }
  int32 MfccDim() const;
  std::vector<LayoutEntry> Layout() const;
  int32 TotalDim() const;
  /// "MFCC,A,E" in canonical order.
  std::string GroupsString() const;
  /// Canonical key=value text covering every field; used for hashing.
  std::string CanonicalString() const;
};

/// The 39-dim configuration used by the GMM stage.
FeatureConfig GmmFeatureConfig(bool cmvn = true);

/// Per-group matrices before assembly.  Empty members were not computed.
struct FeatureGroups {
  FrameSeq mfcc, auditory, energy, chroma, spectral, voicing;
};

/// Concatenates the requested groups in canonical order MFCC,A,E,C,S,V and
/// applies CMVN to the MFCC block when configured.  Throws
/// kDimensionMismatch when the frame counts or group widths disagree.
FeatureMatrix Assemble(const FeatureConfig &config, const FeatureGroups &groups);

/// Computes every group `config` asks for.  `buf` must be at 16 kHz.
FeatureGroups ComputeFeatureGroups(const AudioBuffer &buf,
                                   const FeatureConfig &config);
FeatureMatrix ComputeFeatures(const AudioBuffer &buf, const FeatureConfig &config);

/// Per-utterance mean/variance normalisation of columns [begin, begin+dim).
void ApplyCmvn(FeatureMatrix *m, int32 begin, int32 dim);

}  // namespace lyralign

#endif  // LYRALIGN_FEATURES_H_
