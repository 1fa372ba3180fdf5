// Copyright 2026 The mdlscore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "mdlscore/audio_io.hpp"
#include "mdlscore/error.hpp"
#include "mdlscore/flac.hpp"

using namespace mdlscore;

namespace {

// Minimal canonical WAV header, written byte by byte.
std::vector<std::uint8_t> wav_header(std::uint16_t format, std::uint16_t channels,
                                     std::uint32_t rate, std::uint16_t bits,
                                     std::uint32_t data_bytes) {
  std::vector<std::uint8_t> b;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto tag = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  tag("RIFF");
  u32(36 + data_bytes);
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  tag("data");
  u32(data_bytes);
  return b;
}

std::filesystem::path temp_file(const std::string& name, const std::vector<std::uint8_t>& bytes) {
  const auto path = std::filesystem::temp_directory_path() / ("mdlscore_test_" + name);
  std::ofstream(path, std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  return path;
}

}  // namespace

TEST_CASE("16-bit PCM at 16384 decodes to one half") {
  auto bytes = wav_header(1, 1, 22050, 16, 8);
  for (int i = 0; i < 4; ++i) {
    bytes.push_back(0x00);
    bytes.push_back(0x40);
  }
  const auto path = temp_file("half.wav", bytes);
  const Waveform w = load_waveform(path);
  CHECK(w.sample_rate == 22050);
  REQUIRE(w.samples.size() == 4);
  for (double x : w.samples) CHECK(x == 0.5);
  std::filesystem::remove(path);
}

TEST_CASE("stereo averages or takes the first channel") {
  const std::vector<double> interleaved{0.2, 0.6, 0.2, 0.6, 0.2, 0.6};
  const auto bytes = encode_wav_float32(interleaved, 44100, 2);
  const DecodedAudio audio = decode_wav(bytes);
  CHECK(audio.channels == 2);
  CHECK(audio.frames() == 3);
  for (double x : downmix(audio, ChannelPolicy::kAverage).samples) {
    CHECK(x == doctest::Approx(0.4).epsilon(1e-7));
  }
  for (double x : downmix(audio, ChannelPolicy::kFirst).samples) {
    CHECK(x == doctest::Approx(0.2).epsilon(1e-7));
  }
}

TEST_CASE("8, 24 and 32-bit integer PCM rescale to [-1, 1]") {
  SUBCASE("8-bit is unsigned with midpoint 128") {
    auto bytes = wav_header(1, 1, 8000, 8, 3);
    bytes.insert(bytes.end(), {0x00, 0x80, 0xC0});
    const auto audio = decode_wav(bytes);
    CHECK(audio.interleaved == std::vector<double>{-1.0, 0.0, 0.5});
  }
  SUBCASE("24-bit") {
    auto bytes = wav_header(1, 1, 8000, 24, 6);
    bytes.insert(bytes.end(), {0x00, 0x00, 0x40, 0x00, 0x00, 0x80});
    const auto audio = decode_wav(bytes);
    CHECK(audio.interleaved == std::vector<double>{0.5, -1.0});
  }
  SUBCASE("32-bit") {
    auto bytes = wav_header(1, 1, 8000, 32, 4);
    bytes.insert(bytes.end(), {0x00, 0x00, 0x00, 0xC0});
    CHECK(decode_wav(bytes).interleaved == std::vector<double>{-0.5});
  }
}

TEST_CASE("PCM16 writer round trips through the reader") {
  const std::vector<double> x{0.0, 0.5, -0.5, 0.25, -1.0};
  const auto audio = decode_wav(encode_wav_pcm16(x, 16000));
  CHECK(audio.sample_rate == 16000);
  CHECK(audio.bits_per_sample == 16);
  CHECK(audio.interleaved == x);
}

TEST_CASE("empty and malformed files are rejected") {
  const auto empty = temp_file("empty.wav", {});
  CHECK_THROWS_AS(load_waveform(empty), Error);
  try {
    load_waveform(empty);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateInput);
  }
  std::filesystem::remove(empty);

  const auto no_samples = temp_file("nosamples.wav", wav_header(1, 1, 44100, 16, 0));
  CHECK_THROWS_AS(load_waveform(no_samples), Error);
  std::filesystem::remove(no_samples);

  const std::vector<std::uint8_t> junk{'O', 'g', 'g', 'S', 0, 0, 0, 0};
  const auto other = temp_file("junk.bin", junk);
  try {
    load_waveform(other);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedFormat);
  }
  std::filesystem::remove(other);
  CHECK_THROWS_AS(load_waveform("/nonexistent/clip.wav"), Error);
}

TEST_CASE("normalize_amplitude scales to the target mean absolute value") {
  Waveform w;
  w.samples = {0.5, -0.5};
  CHECK(normalize_amplitude(w, 0.1).samples == std::vector<double>{0.1, -0.1});

  w.samples = {0.25, -0.25, 0.5, 0.0};  // mean |x| = 0.25
  const auto n = normalize_amplitude(w, 0.1);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    CHECK(n.samples[i] == doctest::Approx(w.samples[i] * 0.4).epsilon(1e-15));
  }

  w.samples = {0.0, 0.0};
  CHECK_THROWS_AS(normalize_amplitude(w, 0.1), Error);
  w.samples = {0.1, NAN};
  CHECK_THROWS_AS(normalize_amplitude(w, 0.1), Error);
}

TEST_CASE("normalize_amplitude is idempotent and scale free") {
  Waveform w;
  for (int i = 0; i < 1000; ++i) w.samples.push_back(std::sin(0.37 * i) + 0.1 * std::cos(3.1 * i));
  const auto once = normalize_amplitude(w, 0.1);
  const auto twice = normalize_amplitude(once, 0.1);
  double mean_abs = 0.0;
  for (double x : once.samples) mean_abs += std::abs(x);
  CHECK(mean_abs / 1000.0 == doctest::Approx(0.1).epsilon(1e-12));
  for (double alpha : {1e-4, 0.3, 7.0, 1e5}) {
    Waveform scaled = w;
    for (double& x : scaled.samples) x *= alpha;
    const auto n = normalize_amplitude(scaled, 0.1);
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      CHECK(std::abs(n.samples[i] - once.samples[i]) <= 1e-9);
      CHECK(std::abs(twice.samples[i] - once.samples[i]) <= 1e-12 * std::abs(once.samples[i]) + 1e-300);
    }
  }
}

TEST_CASE("extract_excerpt uses sample index arithmetic") {
  Waveform w;
  w.samples.resize(88200);
  for (std::size_t i = 0; i < w.samples.size(); ++i) w.samples[i] = static_cast<double>(i);
  const auto e = extract_excerpt(w, 0.5, 1.0);
  CHECK(e.samples.size() == 44100);
  CHECK(e.samples.front() == 22050.0);
  CHECK(e.sample_rate == 44100);
  CHECK(extract_excerpt(w, 0.0, 2.0).samples == w.samples);
  CHECK_THROWS_AS(extract_excerpt(w, 1.5, 1.0), Error);
  CHECK_THROWS_AS(extract_excerpt(w, -0.1, 1.0), Error);
  CHECK(extract_samples(w, 10, 5).samples == std::vector<double>{10, 11, 12, 13, 14});
}

TEST_CASE("FLAC encoder output decodes to the input samples") {
  std::vector<std::int32_t> pcm(10000);
  std::uint32_t state = 1;
  for (std::size_t i = 0; i < pcm.size(); ++i) {
    state = state * 1664525u + 1013904223u;
    const double tone = 12000.0 * std::sin(0.01 * static_cast<double>(i));
    pcm[i] = static_cast<std::int32_t>(tone) + static_cast<std::int32_t>(state >> 24) - 128;
  }
  for (std::uint32_t block : {4096u, 1152u, 16u}) {
    flac::EncoderOptions opts;
    opts.block_size = block;
    const auto bytes = flac::encode(pcm, 1, 16, 44100, opts);
    std::uint32_t ch = 0, bps = 0, rate = 0;
    CHECK(flac::decode_integer(bytes, &ch, &bps, &rate) == pcm);
    CHECK(ch == 1);
    CHECK(bps == 16);
    CHECK(rate == 44100);
  }
}

TEST_CASE("FLAC handles stereo, silence, extremes and odd bit depths") {
  std::vector<std::int32_t> stereo;
  for (int i = 0; i < 5000; ++i) {
    stereo.push_back(i % 2 ? 32767 : -32768);
    stereo.push_back((i * 37) % 2001 - 1000);
  }
  CHECK(flac::decode_integer(flac::encode(stereo, 2, 16, 48000)) == stereo);

  const std::vector<std::int32_t> silence(44100, 0);
  const auto quiet = flac::encode(silence, 1, 16, 44100);
  CHECK(quiet.size() < 2000);
  CHECK(flac::decode_integer(quiet) == silence);

  std::vector<std::int32_t> small(3000);
  for (std::size_t i = 0; i < small.size(); ++i) small[i] = static_cast<std::int32_t>(i % 15) - 8;
  CHECK(flac::decode_integer(flac::encode(small, 1, 4, 8000)) == small);

  std::vector<std::int32_t> wide(3000);
  for (std::size_t i = 0; i < wide.size(); ++i) {
    wide[i] = static_cast<std::int32_t>((i * 2654435761u) % 16777216u) - 8388608;
  }
  CHECK(flac::decode_integer(flac::encode(wide, 1, 24, 96000)) == wide);
}

TEST_CASE("FLAC rejects bad parameters and corrupt streams") {
  const std::vector<std::int32_t> pcm{0, 40000};
  CHECK_THROWS_AS(flac::encode(pcm, 1, 16, 44100), Error);
  CHECK_THROWS_AS(flac::encode(pcm, 0, 16, 44100), Error);
  CHECK_THROWS_AS(flac::encode(pcm, 1, 32, 44100), Error);

  std::vector<std::int32_t> ramp(4000);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<std::int32_t>(i) - 2000;
  auto bytes = flac::encode(ramp, 1, 16, 44100);
  bytes[bytes.size() - 3] ^= 0x5A;
  CHECK_THROWS_AS(flac::decode_integer(bytes), Error);
  const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + 20);
  CHECK_THROWS_AS(flac::decode_integer(truncated), Error);
}

TEST_CASE("FLAC files load as waveforms") {
  std::vector<std::int32_t> pcm(2000);
  for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] = static_cast<std::int32_t>(i) * 8 - 8000;
  const auto path = temp_file("ramp.flac", flac::encode(pcm, 1, 16, 32000));
  const Waveform w = load_waveform(path);
  CHECK(w.sample_rate == 32000);
  REQUIRE(w.samples.size() == pcm.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) CHECK(w.samples[i] == pcm[i] / 32768.0);
  std::filesystem::remove(path);
}
