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
#include <span>
#include <string>
#include <vector>

#include "mdlscore/audio_io.hpp"
#include "mdlscore/spectral.hpp"

namespace mdlscore {

struct BaselineScores {
  double spectrogram_entropy = 0.0;   // [0, 100]
  double katz_fd = 0.0;               // >= 1
  double lz_spectrogram_ratio = 0.0;  // space savings, [0, 100]
  double lossless_audio_ratio = 0.0;  // space savings, [0, 100]
  std::string lossless_codec;
};

/// Shannon entropy of the normalized cell mass, as a percentage of log2(cells).
double spectrogram_entropy(const FrameMatrix& frames);

/// Katz fractal dimension over (index, value) points with unit index spacing.
double katz_fd(std::span<const double> samples);

/// 8-bit min-max quantized spectrogram, row-major.
std::vector<std::uint8_t> spectrogram_image(const FrameMatrix& frames);

/// 100 * (1 - deflated / original), zlib at its default level, clamped.
double deflate_savings(std::span<const std::uint8_t> bytes);

double lz_spectrogram_ratio(const FrameMatrix& frames);

std::vector<std::int32_t> quantize_pcm16(std::span<const double> samples);

/// FLAC space savings relative to 16-bit PCM, clamped to [0, 100].
double lossless_audio_ratio(const Waveform& w);

BaselineScores compute_baselines(const Waveform& w, const FrameMatrix& frames);

}  // namespace mdlscore
