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

#include "mdlscore/baselines.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "mdlscore/error.hpp"
#include "mdlscore/flac.hpp"

namespace mdlscore {

double spectrogram_entropy(const FrameMatrix& frames) {
  const auto cells = frames.values();
  if (cells.empty()) throw Error(ErrorCode::kDegenerateInput, "empty spectrogram");
  double total = 0.0;
  for (double v : cells) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "spectrogram cells must be finite and >= 0");
    }
    total += v;
  }
  if (total == 0.0) throw Error(ErrorCode::kDegenerateInput, "all-zero spectrogram");
  if (cells.size() == 1) return 0.0;
  double h = 0.0;
  for (double v : cells) {
    if (v == 0.0) continue;
    const double p = v / total;
    h -= p * std::log2(p);
  }
  return std::clamp(100.0 * h / std::log2(static_cast<double>(cells.size())), 0.0, 100.0);
}

double katz_fd(std::span<const double> x) {
  if (x.size() < 2) throw Error(ErrorCode::kDegenerateInput, "Katz FD needs 2+ samples");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
    throw Error(ErrorCode::kDegenerateInput, "Katz FD of a constant sequence is undefined");
  }
  double length = 0.0;
  double diameter = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    length += std::hypot(1.0, x[i] - x[i - 1]);
    diameter = std::max(diameter, std::hypot(static_cast<double>(i), x[i] - x[0]));
  }
  const double steps = std::log10(static_cast<double>(x.size() - 1));
  if (steps == 0.0) return 1.0;  // a single step is a straight segment
  return steps / (steps + std::log10(diameter / length));
}

std::vector<std::uint8_t> spectrogram_image(const FrameMatrix& frames) {
  const auto cells = frames.values();
  std::vector<std::uint8_t> image(cells.size(), 0);
  if (cells.empty()) return image;
  const auto [lo, hi] = std::minmax_element(cells.begin(), cells.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return image;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    image[i] = static_cast<std::uint8_t>(std::lround(255.0 * (cells[i] - *lo) / range));
  }
  return image;
}

double deflate_savings(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return 0.0;
  uLongf size = compressBound(static_cast<uLong>(bytes.size()));
  std::vector<Bytef> out(size);
  const int rc = compress2(out.data(), &size, bytes.data(), static_cast<uLong>(bytes.size()),
                           Z_DEFAULT_COMPRESSION);
  if (rc != Z_OK) throw Error(ErrorCode::kEncoder, "zlib compress2 failed");
  const double ratio = static_cast<double>(size) / static_cast<double>(bytes.size());
  return std::clamp(100.0 * (1.0 - ratio), 0.0, 100.0);
}

double lz_spectrogram_ratio(const FrameMatrix& frames) {
  return deflate_savings(spectrogram_image(frames));
}

std::vector<std::int32_t> quantize_pcm16(std::span<const double> samples) {
  std::vector<std::int32_t> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double c = std::clamp(samples[i], -1.0, 1.0);
    out[i] = static_cast<std::int32_t>(std::lround(c * 32767.0));
  }
  return out;
}

double lossless_audio_ratio(const Waveform& w) {
  if (w.samples.empty()) throw Error(ErrorCode::kDegenerateInput, "empty waveform");
  const auto pcm = quantize_pcm16(w.samples);
  const auto encoded = flac::encode(pcm, 1, 16, w.sample_rate);
  const double original = 2.0 * static_cast<double>(pcm.size());
  return std::clamp(100.0 * (1.0 - static_cast<double>(encoded.size()) / original), 0.0,
                    100.0);
}

BaselineScores compute_baselines(const Waveform& w, const FrameMatrix& frames) {
  BaselineScores b;
  b.spectrogram_entropy = spectrogram_entropy(frames);
  b.katz_fd = katz_fd(w.samples);
  b.lz_spectrogram_ratio = lz_spectrogram_ratio(frames);
  b.lossless_audio_ratio = lossless_audio_ratio(w);
  b.lossless_codec = flac::kEncoderName;
  return b;
}

}  // namespace mdlscore
