// src/audio.cc

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

#include "lyralign/audio.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lyralign/io-util.h"

namespace lyralign {

namespace {

std::uint32_t ReadU32(const std::uint8_t *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const std::uint8_t *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<std::uint8_t> *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back((v >> (8 * i)) & 0xff);
}

void PutU16(std::vector<std::uint8_t> *out, std::uint16_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
}

// Resamples by reading the input at positions i * step.  The output keeps
// `out_rate` as its label.
AudioBuffer InterpolateAt(const AudioBuffer &buf, size_t out_len, double step,
                          int32 out_rate) {
  AudioBuffer out;
  out.sample_rate_hz = out_rate;
  out.samples.resize(out_len);
  const std::vector<double> &x = buf.samples;
  const size_t n = x.size();
  for (size_t i = 0; i < out_len; ++i) {
    double pos = static_cast<double>(i) * step;
    size_t k = static_cast<size_t>(std::floor(pos));
    if (k >= n - 1) {
      out.samples[i] = x[n - 1];
      continue;
    }
    double frac = pos - static_cast<double>(k);
    out.samples[i] = frac == 0.0 ? x[k] : x[k] + frac * (x[k + 1] - x[k]);
  }
  return out;
}

}  // namespace

AudioBuffer DecodeWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    Fail(ErrorCode::kMalformedHeader, "not a RIFF/WAVE container");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t *data = nullptr;
  size_t data_size = 0;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t *chunk = bytes.data() + pos;
    std::uint32_t chunk_size = ReadU32(chunk + 4);
    size_t body = pos + 8;
    size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || available < 16)
        Fail(ErrorCode::kMalformedHeader, "fmt chunk too small");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt)
        Fail(ErrorCode::kMalformedHeader, "data chunk before fmt chunk");
      data = chunk + 8;
      // Streaming writers leave the size at 0xffffffff; trust the bytes.
      data_size = std::min<size_t>(chunk_size, available);
      have_data = true;
      break;
    }
    size_t advance = 8 + static_cast<size_t>(chunk_size) + (chunk_size & 1);
    if (advance > bytes.size() - pos) break;
    pos += advance;
  }
  if (!have_fmt) Fail(ErrorCode::kMalformedHeader, "missing fmt chunk");
  if (!have_data) Fail(ErrorCode::kMalformedHeader, "missing data chunk");
  if (format != 1)
    Fail(ErrorCode::kUnsupportedCodec,
         "audio format " + std::to_string(format) + " is not PCM");
  if (bits != 16)
    Fail(ErrorCode::kUnsupportedCodec,
         std::to_string(bits) + "-bit samples are not supported");
  if (channels != 1 && channels != 2)
    Fail(ErrorCode::kUnsupportedCodec,
         std::to_string(channels) + " channels are not supported");
  if (rate == 0) Fail(ErrorCode::kMalformedHeader, "zero sample rate");

  const size_t frame_bytes = 2 * channels;
  const size_t frames = data_size / frame_bytes;
  if (frames == 0) Fail(ErrorCode::kEmptyPayload, "no audio samples");

  AudioBuffer buf;
  buf.sample_rate_hz = static_cast<int32>(rate);
  buf.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    const std::uint8_t *p = data + i * frame_bytes;
    if (channels == 1) {
      buf.samples[i] = static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
    } else {
      double l = static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
      double r = static_cast<std::int16_t>(ReadU16(p + 2)) / 32768.0;
      buf.samples[i] = 0.5 * (l + r);
    }
  }
  return buf;
}

AudioBuffer ReadWavFile(const std::string &path) {
  std::string bytes = ReadFileToString(path);
  return DecodeWav(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t *>(bytes.data()), bytes.size()));
}

std::vector<std::uint8_t> EncodeWav(const AudioBuffer &buf) {
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(buf.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  for (char c : std::string("RIFF")) out.push_back(c);
  PutU32(&out, 36 + data_size);
  for (char c : std::string("WAVEfmt ")) out.push_back(c);
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<std::uint32_t>(buf.sample_rate_hz));
  PutU32(&out, static_cast<std::uint32_t>(buf.sample_rate_hz) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  for (char c : std::string("data")) out.push_back(c);
  PutU32(&out, data_size);
  for (double s : buf.samples) {
    double v = std::round(s * 32768.0);
    v = std::clamp(v, -32768.0, 32767.0);
    PutU16(&out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

void WriteWavFile(const std::string &path, const AudioBuffer &buf) {
  std::vector<std::uint8_t> bytes = EncodeWav(buf);
  WriteStringToFile(path, std::string_view(
      reinterpret_cast<const char *>(bytes.data()), bytes.size()));
}

bool IsSupportedRate(int32 rate_hz) {
  switch (rate_hz) {
    case 8000: case 16000: case 22050: case 44100: case 48000: return true;
    default: return false;
  }
}

AudioBuffer Resample(const AudioBuffer &buf, int32 target_hz) {
  if (!IsSupportedRate(target_hz))
    Fail(ErrorCode::kUnsupportedRate,
         "unsupported target rate " + std::to_string(target_hz));
  if (buf.sample_rate_hz <= 0)
    Fail(ErrorCode::kInvalidArgument, "source rate must be positive");
  if (target_hz == buf.sample_rate_hz || buf.samples.empty()) {
    AudioBuffer out = buf;
    out.sample_rate_hz = target_hz;
    return out;
  }
  const double ratio = static_cast<double>(target_hz) / buf.sample_rate_hz;
  size_t out_len = static_cast<size_t>(
      std::llround(static_cast<double>(buf.samples.size()) * ratio));
  return InterpolateAt(buf, out_len,
                       static_cast<double>(buf.sample_rate_hz) / target_hz,
                       target_hz);
}

AudioBuffer SpeedPerturb(const AudioBuffer &buf, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    Fail(ErrorCode::kInvalidArgument, "speed factor must be positive");
  if (factor == 1.0 || buf.samples.empty()) return buf;
  size_t out_len = static_cast<size_t>(
      std::llround(static_cast<double>(buf.samples.size()) / factor));
  return InterpolateAt(buf, out_len, factor, buf.sample_rate_hz);
}

AudioBuffer Canonicalize(const AudioBuffer &buf) {
  if (buf.sample_rate_hz == 16000) return buf;
  return Resample(buf, 16000);
}

}  // namespace lyralign
