// audio-test.cc

#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "lyralign/audio.h"
#include "support/oracles.h"

using namespace lyralign;
using lyralign::testing::DirectDftArgmax;
using lyralign::testing::RmsOf;
using lyralign::testing::Sine;

namespace {

std::string DataPath(const std::string &name) {
  return std::string(LYRALIGN_TEST_DATA) + "/" + name;
}

ErrorCode DecodeError(std::vector<std::uint8_t> bytes) {
  try {
    DecodeWav(bytes);
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("decode unexpectedly succeeded");
  return ErrorCode::kIo;
}

std::vector<std::uint8_t> Header(std::uint16_t format, std::uint16_t channels,
                                 std::uint16_t bits, std::uint32_t data_bytes) {
  AudioBuffer b;
  b.samples.assign(data_bytes / 2, 0.0);
  std::vector<std::uint8_t> w = EncodeWav(b);
  w[20] = format & 0xff; w[21] = format >> 8;
  w[22] = channels & 0xff; w[23] = channels >> 8;
  w[34] = bits & 0xff; w[35] = bits >> 8;
  return w;
}

}  // namespace

TEST_CASE("decode full-scale mono fixture") {
  AudioBuffer b = ReadWavFile(DataPath("mono_max_16k.wav"));
  CHECK(b.sample_rate_hz == 16000);
  REQUIRE(b.samples.size() == 160);
  for (double s : b.samples) CHECK(s == doctest::Approx(32767.0 / 32768.0).epsilon(1e-12));
  CHECK(b.samples[0] == doctest::Approx(0.99997).epsilon(1e-5));
}

TEST_CASE("stereo downmix averages channels") {
  AudioBuffer b = ReadWavFile(DataPath("stereo_half_16k.wav"));
  REQUIRE(b.samples.size() == 16);
  for (double s : b.samples) CHECK(s == 0.0);
}

TEST_CASE("44.1 kHz stereo fixture keeps its rate until resampled") {
  AudioBuffer b = ReadWavFile(DataPath("stereo_44k.wav"));
  CHECK(b.sample_rate_hz == 44100);
  CHECK(b.samples.size() == 4410);
  AudioBuffer c = Canonicalize(b);
  CHECK(c.sample_rate_hz == 16000);
  CHECK(c.samples.size() == 1600);
  // 1 kHz tone: 1600 samples at 16 kHz, 10 Hz bins.
  CHECK(std::abs(DirectDftArgmax(c.samples, 1600, 1, 400) - 100) <= 1);
}

TEST_CASE("decode errors are distinct") {
  CHECK(DecodeError({'J', 'U', 'N', 'K'}) == ErrorCode::kMalformedHeader);
  CHECK(DecodeError(Header(3, 1, 16, 8)) == ErrorCode::kUnsupportedCodec);
  CHECK(DecodeError(Header(1, 1, 24, 8)) == ErrorCode::kUnsupportedCodec);
  CHECK(DecodeError(Header(1, 6, 16, 8)) == ErrorCode::kUnsupportedCodec);
  CHECK(DecodeError(Header(1, 1, 16, 0)) == ErrorCode::kEmptyPayload);
  std::vector<std::uint8_t> no_data = Header(1, 1, 16, 8);
  no_data.resize(36);
  CHECK(DecodeError(no_data) == ErrorCode::kMalformedHeader);
}

TEST_CASE("encode/decode round trip is within 1 LSB") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    AudioBuffer b;
    b.samples.resize(100 + trial * 13);
    for (double &s : b.samples) s = u(rng);
    AudioBuffer back = DecodeWav(EncodeWav(b));
    REQUIRE(back.samples.size() == b.samples.size());
    for (size_t i = 0; i < b.samples.size(); ++i)
      CHECK(std::abs(back.samples[i] - b.samples[i]) <= 1.0 / 32768.0);
    // Decoded buffers are canonical: a second trip is exact.
    CHECK(DecodeWav(EncodeWav(back)) == back);
  }
}

TEST_CASE("resample identity and constants") {
  AudioBuffer b;
  b.samples = Sine(300, 16000, 1000);
  CHECK(Resample(b, 16000) == b);

  AudioBuffer c;
  c.sample_rate_hz = 8000;
  c.samples.assign(800, 0.25);
  AudioBuffer up = Resample(c, 16000);
  CHECK(up.sample_rate_hz == 16000);
  CHECK(up.samples.size() == 1600);
  for (double s : up.samples) CHECK(s == 0.25);

  CHECK_THROWS_AS(Resample(b, 11025), Error);
  try {
    Resample(b, 12345);
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kUnsupportedRate);
  }
}

TEST_CASE("resample length rounds") {
  AudioBuffer b;
  b.sample_rate_hz = 44100;
  b.samples.assign(1001, 0.1);
  CHECK(Resample(b, 16000).samples.size() == 363);  // round(1001 * 16000 / 44100)
  CHECK(Resample(b, 22050).samples.size() == 501);  // round(500.5) away from zero
}

TEST_CASE("1 kHz sine keeps its frequency through 48k -> 16k") {
  AudioBuffer b;
  b.sample_rate_hz = 48000;
  b.samples = Sine(1000, 48000, 4800);
  AudioBuffer r = Resample(b, 16000);
  REQUIRE(r.samples.size() == 1600);
  CHECK(std::abs(DirectDftArgmax(r.samples, 1600, 1, 800) - 100) <= 1);
}

TEST_CASE("resample preserves tone RMS") {
  // Integer down-conversions sample the input exactly.  Otherwise linear
  // interpolation at fractional position a scales a tone of angular frequency
  // w by sqrt(1 - 2a(1-a)(1 - cos w)), whose mean square stays above 0.95^2
  // only while the tone is below ~0.12 of the source rate.
  const int rates[] = {8000, 16000, 22050, 44100, 48000};
  for (int src : rates) {
    for (int dst : rates) {
      double nyq = 0.5 * std::min(src, dst);
      double limit = src % dst == 0 ? 0.4 * nyq : 0.12 * src;
      for (double frac : {0.25, 0.5, 0.95}) {
        double hz = frac * std::min(limit, 0.4 * nyq);
        AudioBuffer b;
        b.sample_rate_hz = src;
        b.samples = Sine(hz, src, src / 2);
        AudioBuffer r = Resample(b, dst);
        double in = RmsOf(b.samples, 0, b.samples.size());
        double out = RmsOf(r.samples, 0, r.samples.size());
        CAPTURE(src);
        CAPTURE(dst);
        CAPTURE(hz);
        CHECK(std::abs(out / in - 1.0) < 0.05);
      }
    }
  }
}

TEST_CASE("speed perturbation") {
  AudioBuffer b;
  b.samples = Sine(440, 16000, 16000);
  CHECK(SpeedPerturb(b, 1.0) == b);

  AudioBuffer slow = SpeedPerturb(b, 0.9);
  CHECK(std::abs(static_cast<double>(slow.samples.size()) - 16000 / 0.9) <= 1.0);
  CHECK(slow.DurationSec() == doctest::Approx(1.111).epsilon(1e-3));
  CHECK(slow.sample_rate_hz == 16000);

  AudioBuffer fast = SpeedPerturb(b, 1.1);
  std::vector<double> head(fast.samples.begin(), fast.samples.begin() + 1600);
  // 10 Hz bins: 484 Hz sits between bins 48 and 49.
  int k = DirectDftArgmax(head, 1600, 1, 200);
  CHECK(std::abs(k * 10.0 - 484.0) <= 10.0);

  CHECK_THROWS_AS(SpeedPerturb(b, 0.0), Error);
  CHECK_THROWS_AS(SpeedPerturb(b, -1.1), Error);
}

TEST_CASE("speed perturbation inverts in duration") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> len(500, 20000);
  for (double f : {0.9, 1.1, 0.75, 1.3}) {
    for (int trial = 0; trial < 10; ++trial) {
      AudioBuffer b;
      b.samples.assign(len(rng), 0.1);
      AudioBuffer back = SpeedPerturb(SpeedPerturb(b, f), 1.0 / f);
      CHECK(std::abs(static_cast<long>(back.samples.size()) -
                     static_cast<long>(b.samples.size())) <= 2);
    }
  }
}
