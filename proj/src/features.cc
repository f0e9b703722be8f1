// src/features.cc

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

#include "lyralign/features.h"

#include <algorithm>
#include <cmath>

#include "lyralign/io-util.h"
#include "lyralign/lld.h"

namespace lyralign {

FeatureConfig FeatureConfig::FromPreset(std::string_view name) {
  FeatureConfig c;
  if (name == "C1") return c;
  if (name == "C2") {
    c.auditory = c.energy = c.chroma = c.spectral = c.voicing = true;
    return c;
  }
  if (name.size() == 4 && name.substr(0, 3) == "C2-") {
    switch (name[3]) {
      case 'A': c.auditory = true; return c;
      case 'E': c.energy = true; return c;
      case 'C': c.chroma = true; return c;
      case 'S': c.spectral = true; return c;
      case 'V': c.voicing = true; return c;
      default: break;
    }
  }
  Fail(ErrorCode::kConfig, "unknown feature preset '" + std::string(name) + "'");
}

FeatureConfig FeatureConfig::FromGroups(std::string_view groups) {
  FeatureConfig c;
  for (const std::string &raw : SplitString(groups, ',')) {
    std::string_view g = Trim(raw);
    if (g == kGroupMfcc || g.empty()) continue;
    if (g == kGroupAuditory) c.auditory = true;
    else if (g == kGroupEnergy) c.energy = true;
    else if (g == kGroupChroma) c.chroma = true;
    else if (g == kGroupSpectral) c.spectral = true;
    else if (g == kGroupVoicing) c.voicing = true;
    else Fail(ErrorCode::kConfig, "unknown feature group '" + std::string(g) + "'");
  }
  return c;
}

int32 FeatureConfig::MfccDim() const {
  switch (mfcc) {
    case MfccVariant::kGmm39: return kMfccGmmDim;
    case MfccVariant::kNn40: return kMfccNnDim;
    case MfccVariant::kAuto: break;
  }
  return HasLld() ? kMfccNnDim : kMfccGmmDim;
}

std::vector<LayoutEntry> FeatureConfig::Layout() const {
  std::vector<LayoutEntry> layout = {{std::string(kGroupMfcc), MfccDim()}};
  if (auditory) layout.push_back({std::string(kGroupAuditory), kAuditoryDim});
  if (energy) layout.push_back({std::string(kGroupEnergy), kEnergyGroupDim});
  if (chroma) layout.push_back({std::string(kGroupChroma), kChromaGroupDim});
  if (spectral) layout.push_back({std::string(kGroupSpectral), kSpectralGroupDim});
  if (voicing) layout.push_back({std::string(kGroupVoicing), kVoicingGroupDim});
  return layout;
}

int32 FeatureConfig::TotalDim() const {
  int32 total = 0;
  for (const auto &e : Layout()) total += e.dim;
  return total;
}

std::string FeatureConfig::GroupsString() const {
  std::string s;
  for (const auto &e : Layout()) {
    if (!s.empty()) s += ',';
    s += e.group;
  }
  return s;
}

std::string FeatureConfig::CanonicalString() const {
  return "groups=" + GroupsString() + "\nmfcc_dim=" + std::to_string(MfccDim()) +
         "\ndelta_window=" + std::to_string(delta_window) +
         "\ncmvn=" + (cmvn ? "1" : "0") +
         "\nwindow_ms=" + FormatDouble(frame.window_ms, 17) +
         "\nhop_ms=" + FormatDouble(frame.hop_ms, 17) +
         "\nfft_size=" + std::to_string(frame.fft_size) + "\n";
}

FeatureConfig GmmFeatureConfig(bool cmvn) {
  FeatureConfig c;
  c.mfcc = MfccVariant::kGmm39;
  c.cmvn = cmvn;
  return c;
}

void ApplyCmvn(FeatureMatrix *m, int32 begin, int32 dim) {
  const int32 n = m->NumFrames();
  if (n == 0) return;
  for (int32 d = begin; d < begin + dim; ++d) {
    double sum = 0.0, sumsq = 0.0;
    for (int32 t = 0; t < n; ++t) {
      double v = (*m)(t, d);
      sum += v;
      sumsq += v * v;
    }
    double mean = sum / n;
    double var = std::max(0.0, sumsq / n - mean * mean);
    double scale = var > 1e-20 ? 1.0 / std::sqrt(var) : 1.0;
    for (int32 t = 0; t < n; ++t)
      (*m)(t, d) = static_cast<float>(((*m)(t, d) - mean) * scale);
  }
}

FeatureMatrix Assemble(const FeatureConfig &config, const FeatureGroups &groups) {
  struct Block {
    std::string_view name;
    const FrameSeq *seq;
    int32 dim;
  };
  std::vector<Block> blocks = {{kGroupMfcc, &groups.mfcc, config.MfccDim()}};
  if (config.auditory) blocks.push_back({kGroupAuditory, &groups.auditory, kAuditoryDim});
  if (config.energy) blocks.push_back({kGroupEnergy, &groups.energy, kEnergyGroupDim});
  if (config.chroma) blocks.push_back({kGroupChroma, &groups.chroma, kChromaGroupDim});
  if (config.spectral) blocks.push_back({kGroupSpectral, &groups.spectral, kSpectralGroupDim});
  if (config.voicing) blocks.push_back({kGroupVoicing, &groups.voicing, kVoicingGroupDim});

  const size_t num_frames = groups.mfcc.size();
  for (const Block &b : blocks) {
    if (b.seq->size() != num_frames)
      Fail(ErrorCode::kDimensionMismatch,
           "group " + std::string(b.name) + " has " +
               std::to_string(b.seq->size()) + " frames, MFCC has " +
               std::to_string(num_frames));
    for (const auto &row : *b.seq)
      if (static_cast<int32>(row.size()) != b.dim)
        Fail(ErrorCode::kDimensionMismatch,
             "group " + std::string(b.name) + " rows must have " +
                 std::to_string(b.dim) + " values");
  }

  FeatureMatrix m(static_cast<int32>(num_frames), config.Layout());
  int32 offset = 0;
  for (const Block &b : blocks) {
    for (size_t t = 0; t < num_frames; ++t) {
      const auto &row = (*b.seq)[t];
      for (int32 d = 0; d < b.dim; ++d) {
        if (!std::isfinite(row[d]))
          Fail(ErrorCode::kInvalidArgument,
               "non-finite value in group " + std::string(b.name));
        m(static_cast<int32>(t), offset + d) = static_cast<float>(row[d]);
      }
    }
    offset += b.dim;
  }
  if (config.cmvn) ApplyCmvn(&m, 0, config.MfccDim());
  return m;
}

namespace {

FrameSeq WithDeltas(const FrameSeq &base, int32 window, bool delta_delta) {
  FrameSeq d1 = ComputeDeltas(base, window);
  FrameSeq d2;
  if (delta_delta) d2 = ComputeDeltas(d1, window);
  FrameSeq out(base.size());
  for (size_t t = 0; t < base.size(); ++t) {
    out[t] = base[t];
    out[t].insert(out[t].end(), d1[t].begin(), d1[t].end());
    if (delta_delta) out[t].insert(out[t].end(), d2[t].begin(), d2[t].end());
  }
  return out;
}

}  // namespace

FeatureGroups ComputeFeatureGroups(const AudioBuffer &buf,
                                   const FeatureConfig &config) {
  if (buf.sample_rate_hz != 16000)
    Fail(ErrorCode::kUnsupportedRate,
         "feature extraction expects 16 kHz audio, got " +
             std::to_string(buf.sample_rate_hz));
  const FrameSpec &spec = config.frame;
  const double rate = buf.sample_rate_hz;
  FrameSeq raw = ExtractFrames(buf, spec);
  FrameSeq windowed = FrameAndWindow(buf, spec);
  const int32 n = static_cast<int32>(raw.size());
  const Fft fft(spec.fft_size);
  const MelBanks banks(kNumMelBands, spec.fft_size, rate);
  const double bin_hz = rate / spec.fft_size;

  FrameSeq power(n), mel(n), log_mel(n);
  for (int32 t = 0; t < n; ++t) {
    power[t] = PowerSpectrum(windowed[t], fft);
    mel[t] = banks.Apply(power[t]);
    log_mel[t] = mel[t];
    for (double &v : log_mel[t]) v = std::log(std::max(v, kMelEnergyFloor));
  }

  FeatureGroups g;
  if (config.MfccDim() == kMfccGmmDim) {
    FrameSeq ceps(n);
    for (int32 t = 0; t < n; ++t) ceps[t] = Dct(log_mel[t], kNumCeps);
    g.mfcc = WithDeltas(ceps, config.delta_window, true);
  } else {
    const MelBanks hires(kMfccNnDim, spec.fft_size, rate);
    g.mfcc.resize(n);
    for (int32 t = 0; t < n; ++t)
      g.mfcc[t] = Dct(hires.LogApply(power[t]), kMfccNnDim);
  }

  FrameSeq rasta;
  if (config.auditory || config.energy) rasta = RastaFilter(log_mel);
  if (config.auditory) g.auditory = WithDeltas(rasta, config.delta_window, false);
  if (config.energy) {
    FrameSeq e(n);
    for (int32 t = 0; t < n; ++t) {
      auto v = EnergyDescriptors(raw[t], windowed[t], log_mel[t], rasta[t]);
      e[t].assign(v.begin(), v.end());
    }
    g.energy = WithDeltas(e, config.delta_window, false);
  }
  if (config.chroma) {
    g.chroma.resize(n);
    for (int32 t = 0; t < n; ++t) {
      auto v = Chroma(power[t], bin_hz);
      g.chroma[t].assign(v.begin(), v.end());
    }
  }
  if (config.spectral) {
    FrameSeq s(n);
    for (int32 t = 0; t < n; ++t) {
      std::span<const double> prev;
      if (t > 0) prev = power[t - 1];
      auto v = SpectralDescriptors(power[t], prev, mel[t], raw[t], bin_hz, rate);
      s[t].assign(v.begin(), v.end());
    }
    g.spectral = WithDeltas(s, config.delta_window, false);
  }
  if (config.voicing) {
    FrameSeq v(n);
    for (int32 t = 0; t < n; ++t) {
      auto arr = VoicingForFrame(buf, spec, t).ToArray();
      v[t].assign(arr.begin(), arr.end());
    }
    g.voicing = WithDeltas(v, config.delta_window, false);
  }
  return g;
}

FeatureMatrix ComputeFeatures(const AudioBuffer &buf, const FeatureConfig &config) {
  return Assemble(config, ComputeFeatureGroups(buf, config));
}

}  // namespace lyralign
