// src/lld.cc

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

#include "lyralign/lld.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lyralign {

FrameSeq RastaFilter(const FrameSeq &log_spec) {
  typedef RastaFilterCoefficients C;
  const int32 num_frames = static_cast<int32>(log_spec.size());
  FrameSeq out(num_frames);
  if (num_frames == 0) return out;
  const size_t num_bands = log_spec[0].size();
  for (auto &row : out) row.assign(num_bands, 0.0);

  auto input = [&](int32 t, size_t b) {
    return log_spec[std::clamp(t, 0, num_frames - 1)][b];
  };
  for (size_t b = 0; b < num_bands; ++b) {
    double state = 0.0;
    for (int32 t = 0; t < num_frames + C::kAdvance; ++t) {
      double acc = 0.0;
      for (int32 i = 0; i < 5; ++i) acc += C::kNumerator[i] * input(t - i, b);
      state = C::kPole * state + acc;
      if (t >= C::kAdvance) out[t - C::kAdvance][b] = state;
    }
  }
  return out;
}

double ZeroCrossingRate(std::span<const double> raw_frame) {
  if (raw_frame.size() < 2) return 0.0;
  size_t crossings = 0;
  for (size_t i = 1; i < raw_frame.size(); ++i)
    if ((raw_frame[i] >= 0.0) != (raw_frame[i - 1] >= 0.0)) ++crossings;
  return static_cast<double>(crossings) / (raw_frame.size() - 1);
}

double Rms(std::span<const double> frame) {
  if (frame.empty()) return 0.0;
  double sum = 0.0;
  for (double v : frame) sum += v * v;
  return std::sqrt(sum / frame.size());
}

std::array<double, kEnergyDim> EnergyDescriptors(
    std::span<const double> raw_frame, std::span<const double> windowed_frame,
    std::span<const double> log_mel, std::span<const double> rasta) {
  double loudness = 0.0, rasta_sum = 0.0;
  for (double v : log_mel) loudness += std::exp(v);
  for (double v : rasta) rasta_sum += v;
  return {loudness, rasta_sum, Rms(windowed_frame), ZeroCrossingRate(raw_frame)};
}

int32 PitchClass(double hz) {
  long semis = std::lround(12.0 * std::log2(hz / 440.0));
  long pc = (semis + 9) % 12;
  if (pc < 0) pc += 12;
  return static_cast<int32>(pc);
}

std::array<double, kChromaDim> Chroma(std::span<const double> power,
                                      double bin_hz) {
  std::array<double, kChromaDim> chroma{};
  for (size_t k = 1; k < power.size(); ++k) {
    double hz = k * bin_hz;
    if (hz <= kChromaMinHz) continue;
    chroma[PitchClass(hz)] += std::sqrt(power[k]);
  }
  double total = std::accumulate(chroma.begin(), chroma.end(), 0.0);
  if (total > 0.0)
    for (double &v : chroma) v /= total;
  return chroma;
}

double SpectralRolloff(std::span<const double> power, double bin_hz,
                       double fraction) {
  double total = std::accumulate(power.begin(), power.end(), 0.0);
  if (!(total > 0.0)) return 0.0;
  double target = fraction * total, cum = 0.0;
  for (size_t k = 0; k < power.size(); ++k) {
    cum += power[k];
    if (cum >= target) return k * bin_hz;
  }
  return (power.size() - 1) * bin_hz;
}

double SpectralEntropy(std::span<const double> power) {
  double total = std::accumulate(power.begin(), power.end(), 0.0);
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double p : power) {
    if (p <= 0.0) continue;
    double q = p / total;
    h -= q * std::log(q);
  }
  return std::max(h, 0.0);
}

double SpectralFlux(std::span<const double> power,
                    std::span<const double> prev_power) {
  if (prev_power.empty()) return 0.0;
  if (prev_power.size() != power.size())
    Fail(ErrorCode::kDimensionMismatch, "flux needs equal-length spectra");
  double cur = std::accumulate(power.begin(), power.end(), 0.0);
  double prev = std::accumulate(prev_power.begin(), prev_power.end(), 0.0);
  double cur_norm = cur > 0.0 ? 1.0 / std::sqrt(cur) : 0.0;
  double prev_norm = prev > 0.0 ? 1.0 / std::sqrt(prev) : 0.0;
  double flux = 0.0;
  for (size_t k = 0; k < power.size(); ++k) {
    double d = std::sqrt(power[k]) * cur_norm -
               std::sqrt(prev_power[k]) * prev_norm;
    flux += d * d;
  }
  return flux;
}

double Sharpness(std::span<const double> mel_energies) {
  double num = 0.0, den = 0.0;
  for (size_t b = 0; b < mel_energies.size(); ++b) {
    double z = static_cast<double>(b + 1);
    double g = z <= 14.0 ? 1.0 : std::exp(0.171 * (z - 14.0));
    num += mel_energies[b] * g * z;
    den += mel_energies[b];
  }
  return den > 0.0 ? 0.11 * num / den : 0.0;
}

double Harmonicity(std::span<const double> raw_frame, double sample_rate_hz) {
  const int32 n = static_cast<int32>(raw_frame.size());
  double r0 = 0.0;
  for (double v : raw_frame) r0 += v * v;
  if (!(r0 > 0.0)) return 0.0;
  const int32 lag_min = static_cast<int32>(std::floor(sample_rate_hz / kMaxF0Hz));
  const int32 lag_max =
      std::min(n - 1, static_cast<int32>(std::ceil(sample_rate_hz / kMinF0Hz)));
  double best = 0.0;
  bool any = false;
  for (int32 lag = lag_min; lag <= lag_max; ++lag) {
    double r = 0.0;
    for (int32 i = 0; i + lag < n; ++i) r += raw_frame[i] * raw_frame[i + lag];
    r /= r0;
    if (!any || r > best) best = r;
    any = true;
  }
  return any ? best : 0.0;
}

std::array<double, kSpectralDim> SpectralDescriptors(
    std::span<const double> power, std::span<const double> prev_power,
    std::span<const double> mel_energies, std::span<const double> raw_frame,
    double bin_hz, double sample_rate_hz) {
  std::array<double, kSpectralDim> out{};
  const double total = std::accumulate(power.begin(), power.end(), 0.0);
  if (!(total > 0.0)) return out;

  double e_low = 0.0, e_mid = 0.0;
  for (size_t k = 0; k < power.size(); ++k) {
    double hz = k * bin_hz;
    if (hz >= 250.0 && hz <= 650.0) e_low += power[k];
    if (hz >= 1000.0 && hz <= 4000.0) e_mid += power[k];
  }
  out[kSpecEnergy250To650] = e_low / total;
  out[kSpecEnergy1kTo4k] = e_mid / total;
  out[kSpecRolloff25] = SpectralRolloff(power, bin_hz, 0.25);
  out[kSpecRolloff50] = SpectralRolloff(power, bin_hz, 0.50);
  out[kSpecRolloff75] = SpectralRolloff(power, bin_hz, 0.75);
  out[kSpecRolloff90] = SpectralRolloff(power, bin_hz, 0.90);
  out[kSpecFlux] = SpectralFlux(power, prev_power);

  double centroid = 0.0;
  for (size_t k = 0; k < power.size(); ++k)
    centroid += (power[k] / total) * (k * bin_hz);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (size_t k = 0; k < power.size(); ++k) {
    double p = power[k] / total, d = k * bin_hz - centroid;
    m2 += p * d * d;
    m3 += p * d * d * d;
    m4 += p * d * d * d * d;
  }
  out[kSpecCentroid] = centroid;
  out[kSpecEntropy] = SpectralEntropy(power);
  out[kSpecVariance] = m2;
  // Degenerate (single-bin) distributions have no defined shape moments.
  if (m2 > 1e-12) {
    out[kSpecSkewness] = m3 / std::pow(m2, 1.5);
    out[kSpecKurtosis] = m4 / (m2 * m2);
  }

  const double n = static_cast<double>(power.size());
  double mean_f = 0.5 * (n - 1) * bin_hz, mean_p = total / n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t k = 0; k < power.size(); ++k) {
    double df = k * bin_hz - mean_f;
    sxy += df * (power[k] - mean_p);
    sxx += df * df;
  }
  out[kSpecSlope] = sxx > 0.0 ? sxy / sxx : 0.0;
  out[kSpecSharpness] = Sharpness(mel_energies);
  out[kSpecHarmonicity] = Harmonicity(raw_frame, sample_rate_hz);
  return out;
}

namespace {

// Vertex of the parabola through (-1, a), (0, b), (1, c): returns the offset
// in [-0.5, 0.5] and writes the interpolated peak value.
double ParabolicPeak(double a, double b, double c, double *value) {
  double denom = a - 2.0 * b + c;
  if (denom >= 0.0) {
    *value = b;
    return 0.0;
  }
  double offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  *value = b - 0.25 * (a - c) * offset;
  return offset;
}

}  // namespace

VoicingDescriptors AnalyzeVoicing(std::span<const double> x,
                                  double sample_rate_hz) {
  VoicingDescriptors out;
  const int32 w = static_cast<int32>(x.size());
  double energy = 0.0;
  for (double v : x) energy += v * v;
  if (!(energy > 1e-20)) return out;

  const int32 lag_min =
      std::max(2, static_cast<int32>(std::floor(sample_rate_hz / kMaxF0Hz)));
  const int32 lag_max = std::min(
      static_cast<int32>(std::ceil(sample_rate_hz / kMinF0Hz)), w / 2);
  if (lag_max - lag_min < 2) return out;

  // Normalised cross-correlation over lag_min - 1 .. lag_max + 1.
  std::vector<double> nccf(lag_max + 2, 0.0);
  for (int32 lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
    double num = 0.0, e0 = 0.0, e1 = 0.0;
    for (int32 i = 0; i + lag < w; ++i) {
      num += x[i] * x[i + lag];
      e0 += x[i] * x[i];
      e1 += x[i + lag] * x[i + lag];
    }
    double den = std::sqrt(e0 * e1);
    nccf[lag] = den > 0.0 ? num / den : 0.0;
  }

  double global_max = -2.0;
  for (int32 lag = lag_min; lag <= lag_max; ++lag)
    global_max = std::max(global_max, nccf[lag]);
  if (!(global_max > 0.0)) {
    out.voicing = 0.0;
    return out;
  }
  // Smallest-lag local maximum close to the global maximum; this avoids the
  // period-doubling errors that plain argmax makes on clean tones.
  int32 best_lag = -1;
  for (int32 lag = lag_min; lag <= lag_max; ++lag) {
    if (nccf[lag] >= nccf[lag - 1] && nccf[lag] >= nccf[lag + 1] &&
        nccf[lag] >= 0.9 * global_max) {
      best_lag = lag;
      break;
    }
  }
  if (best_lag < 0) best_lag = lag_min;
  double peak = 0.0;
  double offset =
      ParabolicPeak(nccf[best_lag - 1], nccf[best_lag], nccf[best_lag + 1], &peak);
  peak = std::clamp(peak, 0.0, 1.0);
  out.voicing = peak;
  if (peak < kVoicingThreshold) return out;

  const double period = best_lag + offset;
  out.f0_hz = sample_rate_hz / period;
  if (peak >= 1.0)
    out.log_hnr_db = kMaxLogHnrDb;
  else
    out.log_hnr_db = std::clamp(10.0 * std::log10(peak / (1.0 - peak)),
                                kMinLogHnrDb, kMaxLogHnrDb);

  // Period marks: successive waveform maxima about one period apart.
  std::vector<double> marks, amps;
  auto refine = [&](int32 k) {
    double value = x[k], off = 0.0;
    if (k > 0 && k + 1 < w) off = ParabolicPeak(x[k - 1], x[k], x[k + 1], &value);
    marks.push_back(k + off);
    amps.push_back(value);
  };
  int32 first_end = std::min(w, static_cast<int32>(std::lround(period)));
  int32 k = static_cast<int32>(
      std::max_element(x.begin(), x.begin() + first_end) - x.begin());
  refine(k);
  while (true) {
    int32 lo = k + static_cast<int32>(std::ceil(0.8 * period));
    int32 hi = k + static_cast<int32>(std::floor(1.2 * period));
    if (hi >= w) break;
    k = static_cast<int32>(
        std::max_element(x.begin() + lo, x.begin() + hi + 1) - x.begin());
    refine(k);
  }
  const size_t num_periods = marks.size() >= 2 ? marks.size() - 1 : 0;
  if (num_periods < 3) return out;

  std::vector<double> periods(num_periods);
  for (size_t i = 0; i < num_periods; ++i) periods[i] = marks[i + 1] - marks[i];
  double mean_t = std::accumulate(periods.begin(), periods.end(), 0.0) /
                  num_periods;
  double jl = 0.0, jd = 0.0;
  for (size_t i = 1; i < num_periods; ++i) jl += std::abs(periods[i] - periods[i - 1]);
  for (size_t i = 1; i + 1 < num_periods; ++i)
    jd += std::abs((periods[i + 1] - periods[i]) - (periods[i] - periods[i - 1]));
  out.jitter_local = jl / (num_periods - 1) / mean_t;
  out.jitter_delta = jd / (num_periods - 2) / mean_t;

  double mean_a = std::accumulate(amps.begin(), amps.end(), 0.0) / amps.size();
  double sa = 0.0;
  for (size_t i = 1; i < amps.size(); ++i) sa += std::abs(amps[i] - amps[i - 1]);
  out.shimmer = mean_a > 0.0 ? sa / (amps.size() - 1) / mean_a : 0.0;
  return out;
}

VoicingDescriptors VoicingForFrame(const AudioBuffer &buf,
                                   const FrameSpec &spec, int32 frame_index) {
  const int32 rate = buf.sample_rate_hz;
  const int64 center = static_cast<int64>(frame_index) * spec.HopSamples(rate) +
                       spec.WindowSamples(rate) / 2;
  const int64 half = static_cast<int64>(std::lround(kVoicingWindowMs * rate / 1000.0)) / 2;
  const int64 n = static_cast<int64>(buf.samples.size());
  int64 begin = std::max<int64>(0, center - half);
  int64 end = std::min<int64>(n, center + half);
  if (end <= begin) return {};
  return AnalyzeVoicing(
      std::span<const double>(buf.samples.data() + begin, end - begin), rate);
}

}  // namespace lyralign
