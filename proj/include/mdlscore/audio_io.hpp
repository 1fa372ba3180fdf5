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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mdlscore {

/// Mono sample sequence at a fixed rate. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  std::uint32_t sample_rate = 44100;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class ChannelPolicy { kAverage, kFirst };

inline constexpr double kPcm16Scale = 32768.0;
inline constexpr double kDefaultTargetMeanAbs = 0.1;

/// Interleaved multichannel PCM as decoded from a container, before downmix.
struct DecodedAudio {
  std::vector<double> interleaved;
  std::uint32_t sample_rate = 0;
  std::uint32_t channels = 0;
  std::uint32_t bits_per_sample = 0;

  std::size_t frames() const {
    return channels == 0 ? 0 : interleaved.size() / channels;
  }
};

// WAV container (PCM 8/16/24/32-bit integer and 32/64-bit float).
DecodedAudio decode_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_wav_pcm16(std::span<const double> samples,
                                           std::uint32_t sample_rate,
                                           std::uint32_t channels = 1);
std::vector<std::uint8_t> encode_wav_float32(std::span<const double> samples,
                                             std::uint32_t sample_rate,
                                             std::uint32_t channels = 1);
void write_wav_pcm16(const std::filesystem::path& path, const Waveform& w);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

Waveform downmix(const DecodedAudio& audio, ChannelPolicy policy);

/// Decodes a WAV or FLAC file (detected by magic bytes) into a mono waveform.
/// Integer PCM is rescaled to [-1, 1] by 2^(bits-1).
Waveform load_waveform(const std::filesystem::path& path,
                       ChannelPolicy policy = ChannelPolicy::kAverage);

/// Scales samples so that mean(|x|) equals `target_mean_abs`.
/// Throws kDegenerateInput on an all-zero waveform.
Waveform normalize_amplitude(const Waveform& w,
                             double target_mean_abs = kDefaultTargetMeanAbs);

/// Contiguous slice [offset, offset + duration) in seconds. Sample indices are
/// rounded to the nearest integer.
Waveform extract_excerpt(const Waveform& w, double offset_s, double duration_s);

/// Same as extract_excerpt but in sample units.
Waveform extract_samples(const Waveform& w, std::size_t offset,
                         std::size_t count);

}  // namespace mdlscore
