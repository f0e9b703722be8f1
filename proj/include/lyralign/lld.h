// include/lyralign/lld.h

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

#ifndef LYRALIGN_LLD_H_
#define LYRALIGN_LLD_H_

// Per-frame low-level descriptors for the auditory (A), energy (E),
// chroma (C), spectral (S) and voicing (V) feature groups.

#include <array>
#include <span>
#include <vector>

#include "lyralign/signal.h"

namespace lyralign {

// ---------------------------------------------------------------------------
// RASTA

/// H(z) = 0.1 z^4 (2 + z^-1 - z^-3 - 2 z^-4) / (1 - 0.98 z^-1).
struct RastaFilterCoefficients {
  static constexpr std::array<double, 5> kNumerator = {0.2, 0.1, 0.0, -0.1,
                                                       -0.2};
  static constexpr double kPole = 0.98;
  static constexpr int32 kAdvance = 4;
};

/// Filters every band trajectory of `log_spec` (frames x bands) with the
/// RASTA band-pass.  Runs causally and shifts the output back by the 4-frame
/// advance.  Samples before the first frame and after the last one are taken
/// as edge replicas, so a constant trajectory maps to exactly zero.
FrameSeq RastaFilter(const FrameSeq &log_spec);

// ---------------------------------------------------------------------------
// Energy group: loudness, RASTA sum, RMS, zero-crossing rate.

constexpr int32 kEnergyDim = 4;

/// Fraction of adjacent sample pairs whose signs differ (x >= 0 counts as
/// positive).  Zero for frames shorter than two samples.
double ZeroCrossingRate(std::span<const double> raw_frame);
double Rms(std::span<const double> frame);

/// [sum of floored mel energies, sum of RASTA bands, RMS of the windowed frame,
///  ZCR of the raw frame].
std::array<double, kEnergyDim> EnergyDescriptors(
    std::span<const double> raw_frame, std::span<const double> windowed_frame,
    std::span<const double> log_mel, std::span<const double> rasta);

// ---------------------------------------------------------------------------
// Chroma

constexpr int32 kChromaDim = 12;
constexpr double kChromaMinHz = 55.0;

/// Pitch class of a frequency in A440 equal temperament; 0 = C, 9 = A.
int32 PitchClass(double hz);

/// Bin magnitudes above 55 Hz summed per pitch class and L1-normalised.
/// An all-zero spectrum gives an all-zero vector.
std::array<double, kChromaDim> Chroma(std::span<const double> power,
                                      double bin_hz);

// ---------------------------------------------------------------------------
// Spectral group

constexpr int32 kSpectralDim = 15;

enum SpectralIndex {
  kSpecEnergy250To650 = 0,
  kSpecEnergy1kTo4k,
  kSpecRolloff25,
  kSpecRolloff50,
  kSpecRolloff75,
  kSpecRolloff90,
  kSpecFlux,
  kSpecCentroid,
  kSpecEntropy,
  kSpecVariance,
  kSpecSkewness,
  kSpecKurtosis,
  kSpecSlope,
  kSpecSharpness,
  kSpecHarmonicity,
};

/// Frequency (Hz) of the first bin at which cumulative power reaches
/// `fraction` of the total; 0 for a silent spectrum.
double SpectralRolloff(std::span<const double> power, double bin_hz,
                       double fraction);
/// Shannon entropy (nats) of the power spectrum normalised to unit sum.
double SpectralEntropy(std::span<const double> power);
/// Sum of squared differences of unit-L2-norm magnitude spectra.
double SpectralFlux(std::span<const double> power,
                    std::span<const double> prev_power);
/// Zwicker-weighted loudness centroid over mel bands; band b sits at z = b+1.
double Sharpness(std::span<const double> mel_energies);
/// max over lags (55..880 Hz) of the biased autocorrelation r(lag) / r(0).
double Harmonicity(std::span<const double> raw_frame, double sample_rate_hz);

/// All 15 descriptors in SpectralIndex order.  `prev_power` is empty for the
/// first frame (flux 0).  A silent spectrum yields all zeros.
std::array<double, kSpectralDim> SpectralDescriptors(
    std::span<const double> power, std::span<const double> prev_power,
    std::span<const double> mel_energies, std::span<const double> raw_frame,
    double bin_hz, double sample_rate_hz);

// ---------------------------------------------------------------------------
// Voicing group

constexpr int32 kVoicingDim = 6;
constexpr double kVoicingThreshold = 0.45;
constexpr double kMinF0Hz = 55.0;
constexpr double kMaxF0Hz = 880.0;
constexpr double kMinLogHnrDb = -20.0;
constexpr double kMaxLogHnrDb = 40.0;
/// Analysis window for this group; 25 ms cannot hold two 55 Hz periods.
constexpr double kVoicingWindowMs = 50.0;

struct VoicingDescriptors {
  double f0_hz = 0.0;
  double voicing = 0.0;
  double jitter_local = 0.0;
  double jitter_delta = 0.0;
  double shimmer = 0.0;
  double log_hnr_db = kMinLogHnrDb;

  std::array<double, kVoicingDim> ToArray() const {
    return {f0_hz, voicing, jitter_local, jitter_delta, shimmer, log_hnr_db};
  }
};

/// Analyses a window of samples (already cut out, zero-padded at the
/// utterance edges).  F0 is the normalised cross-correlation peak between
/// 55 and 880 Hz, refined by parabolic interpolation; frames whose peak is
/// below kVoicingThreshold are unvoiced (F0, jitter, shimmer 0, HNR -20 dB).
VoicingDescriptors AnalyzeVoicing(std::span<const double> window,
                                  double sample_rate_hz);

/// Voicing descriptors for frame `frame_index` of `buf`: a 50 ms window
/// centred on the centre of the 25 ms frame with the same index.
VoicingDescriptors VoicingForFrame(const AudioBuffer &buf,
                                   const FrameSpec &spec, int32 frame_index);

}  // namespace lyralign

#endif  // LYRALIGN_LLD_H_
