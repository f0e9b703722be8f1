// src/signal.cc

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

#include "lyralign/signal.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace lyralign {

int32 FrameSpec::WindowSamples(int32 rate_hz) const {
  return static_cast<int32>(std::lround(window_ms * rate_hz / 1000.0));
}

int32 FrameSpec::HopSamples(int32 rate_hz) const {
  return static_cast<int32>(std::lround(hop_ms * rate_hz / 1000.0));
}

void FrameSpec::Validate(int32 rate_hz) const {
  if (!(window_ms > 0.0) || !(hop_ms > 0.0) || hop_ms > window_ms)
    Fail(ErrorCode::kInvalidArgument, "frame spec needs 0 < hop <= window");
  if (!IsPowerOfTwo(fft_size) || fft_size < WindowSamples(rate_hz))
    Fail(ErrorCode::kInvalidArgument,
         "fft_size must be a power of two holding one window");
}

int32 NumFrames(size_t num_samples, const FrameSpec &spec, int32 rate_hz) {
  const size_t win = spec.WindowSamples(rate_hz);
  const size_t hop = spec.HopSamples(rate_hz);
  if (num_samples < win) return 0;
  return static_cast<int32>(1 + (num_samples - win) / hop);
}

std::vector<double> HammingWindow(int32 length) {
  std::vector<double> w(length, 1.0);
  if (length == 1) return w;
  for (int32 n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (length - 1));
  return w;
}

FrameSeq ExtractFrames(const AudioBuffer &buf, const FrameSpec &spec) {
  spec.Validate(buf.sample_rate_hz);
  const int32 win = spec.WindowSamples(buf.sample_rate_hz);
  const int32 hop = spec.HopSamples(buf.sample_rate_hz);
  const int32 n = NumFrames(buf.samples.size(), spec, buf.sample_rate_hz);
  if (n == 0)
    Fail(ErrorCode::kTooShort,
         "buffer of " + std::to_string(buf.samples.size()) +
             " samples is shorter than one " + std::to_string(win) +
             "-sample window");
  FrameSeq frames(n);
  for (int32 t = 0; t < n; ++t) {
    auto begin = buf.samples.begin() + static_cast<size_t>(t) * hop;
    frames[t].assign(begin, begin + win);
  }
  return frames;
}

FrameSeq FrameAndWindow(const AudioBuffer &buf, const FrameSpec &spec) {
  FrameSeq frames = ExtractFrames(buf, spec);
  const std::vector<double> window = HammingWindow(
      spec.WindowSamples(buf.sample_rate_hz));
  for (auto &frame : frames)
    for (size_t i = 0; i < frame.size(); ++i) frame[i] *= window[i];
  return frames;
}

std::vector<double> PowerSpectrum(std::span<const double> frame,
                                  const Fft &fft) {
  const int32 n = fft.Size();
  if (static_cast<int32>(frame.size()) > n)
    Fail(ErrorCode::kDimensionMismatch, "frame longer than FFT size");
  std::vector<std::complex<double>> data(n);
  for (size_t i = 0; i < frame.size(); ++i) data[i] = frame[i];
  fft.Forward(&data);
  std::vector<double> power(n / 2 + 1);
  for (int32 k = 0; k <= n / 2; ++k) power[k] = std::norm(data[k]);
  return power;
}

std::vector<double> PowerSpectrum(std::span<const double> frame,
                                  int32 fft_size) {
  return PowerSpectrum(frame, Fft(fft_size));
}

double MelBanks::MelScale(double hz) { return 1127.0 * std::log1p(hz / 700.0); }

double MelBanks::InverseMelScale(double mel) {
  return 700.0 * (std::exp(mel / 1127.0) - 1.0);
}

MelBanks::MelBanks(int32 num_bands, int32 fft_size, double sample_rate_hz,
                   double low_hz, double high_hz) {
  if (num_bands < 1) Fail(ErrorCode::kInvalidArgument, "need >= 1 mel band");
  if (high_hz <= 0.0) high_hz = 0.5 * sample_rate_hz;
  if (!(low_hz >= 0.0 && low_hz < high_hz && high_hz <= 0.5 * sample_rate_hz))
    Fail(ErrorCode::kInvalidArgument, "bad mel frequency range");
  num_bins_ = fft_size / 2 + 1;
  bin_hz_ = sample_rate_hz / fft_size;
  const double mel_lo = MelScale(low_hz), mel_hi = MelScale(high_hz);
  const double delta = (mel_hi - mel_lo) / (num_bands + 1);
  edges_mel_.resize(num_bands + 2);
  for (int32 i = 0; i < num_bands + 2; ++i) edges_mel_[i] = mel_lo + i * delta;

  offsets_.assign(num_bands, 0);
  weights_.assign(num_bands, {});
  for (int32 b = 0; b < num_bands; ++b) {
    const double left = LeftMel(b), center = CenterMel(b), right = RightMel(b);
    int32 first = -1;
    std::vector<double> w;
    for (int32 k = 0; k < num_bins_; ++k) {
      double mel = MelScale(k * bin_hz_);
      double weight = 0.0;
      if (mel > left && mel <= center)
        weight = (mel - left) / (center - left);
      else if (mel > center && mel < right)
        weight = (right - mel) / (right - center);
      if (weight > 0.0) {
        if (first < 0) first = k;
        w.resize(k - first + 1, 0.0);
        w[k - first] = weight;
      }
    }
    offsets_[b] = std::max(first, 0);
    weights_[b] = std::move(w);
  }
}

double MelBanks::Weight(int32 band, int32 bin) const {
  int32 i = bin - offsets_[band];
  if (i < 0 || i >= static_cast<int32>(weights_[band].size())) return 0.0;
  return weights_[band][i];
}

std::vector<double> MelBanks::Apply(std::span<const double> power) const {
  if (static_cast<int32>(power.size()) != num_bins_)
    Fail(ErrorCode::kDimensionMismatch, "power spectrum has wrong bin count");
  std::vector<double> energies(NumBands(), 0.0);
  for (int32 b = 0; b < NumBands(); ++b) {
    const std::vector<double> &w = weights_[b];
    double sum = 0.0;
    for (size_t i = 0; i < w.size(); ++i) sum += w[i] * power[offsets_[b] + i];
    energies[b] = sum;
  }
  return energies;
}

std::vector<double> MelBanks::LogApply(std::span<const double> power) const {
  std::vector<double> e = Apply(power);
  for (double &v : e) v = std::log(std::max(v, kMelEnergyFloor));
  return e;
}

std::vector<double> Dct(std::span<const double> input, int32 num_out) {
  const int32 n = static_cast<int32>(input.size());
  if (num_out < 1 || num_out > n)
    Fail(ErrorCode::kInvalidArgument,
         "cannot keep " + std::to_string(num_out) + " cepstra from " +
             std::to_string(n) + " bands");
  std::vector<double> out(num_out, 0.0);
  for (int32 k = 0; k < num_out; ++k) {
    double sum = 0.0;
    for (int32 i = 0; i < n; ++i)
      sum += input[i] * std::cos(std::numbers::pi * k * (i + 0.5) / n);
    out[k] = sum * (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n));
  }
  return out;
}

FrameSeq ComputeDeltas(const FrameSeq &seq, int32 window) {
  if (window < 1) Fail(ErrorCode::kInvalidArgument, "delta window must be >= 1");
  const int32 t_max = static_cast<int32>(seq.size());
  FrameSeq out(seq.size());
  if (seq.empty()) return out;
  const size_t dim = seq[0].size();
  double denom = 0.0;
  for (int32 n = 1; n <= window; ++n) denom += 2.0 * n * n;
  for (int32 t = 0; t < t_max; ++t) {
    out[t].assign(dim, 0.0);
    for (int32 n = 1; n <= window; ++n) {
      const auto &ahead = seq[std::min(t + n, t_max - 1)];
      const auto &behind = seq[std::max(t - n, 0)];
      for (size_t d = 0; d < dim; ++d) out[t][d] += n * (ahead[d] - behind[d]);
    }
    for (size_t d = 0; d < dim; ++d) out[t][d] /= denom;
  }
  return out;
}

}  // namespace lyralign
