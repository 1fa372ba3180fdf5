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

#include "mdlscore/audio_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "mdlscore/error.hpp"
#include "mdlscore/flac.hpp"

namespace mdlscore {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (f.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

Waveform downmix(const DecodedAudio& audio, ChannelPolicy policy) {
  if (audio.channels == 0) {
    throw Error(ErrorCode::kUnsupportedFormat, "audio has no channels");
  }
  Waveform w;
  w.sample_rate = audio.sample_rate;
  const std::size_t frames = audio.frames();
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const double* frame = audio.interleaved.data() + i * audio.channels;
    if (policy == ChannelPolicy::kFirst || audio.channels == 1) {
      w.samples[i] = frame[0];
    } else {
      double sum = 0.0;
      for (std::uint32_t c = 0; c < audio.channels; ++c) sum += frame[c];
      w.samples[i] = sum / audio.channels;
    }
  }
  return w;
}

Waveform load_waveform(const std::filesystem::path& path, ChannelPolicy policy) {
  const auto bytes = read_file_bytes(path);
  if (bytes.empty()) {
    throw Error(ErrorCode::kDegenerateInput, "zero-length audio: " + path.string());
  }
  DecodedAudio audio;
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "fLaC", 4) == 0) {
    audio = flac::decode(bytes);
  } else if (bytes.size() >= 4 && std::memcmp(bytes.data(), "RIFF", 4) == 0) {
    audio = decode_wav(bytes);
  } else {
    throw Error(ErrorCode::kUnsupportedFormat,
                "unrecognized audio container: " + path.string());
  }
  Waveform w = downmix(audio, policy);
  if (w.samples.empty()) {
    throw Error(ErrorCode::kDegenerateInput, "zero-length audio: " + path.string());
  }
  return w;
}

Waveform normalize_amplitude(const Waveform& w, double target_mean_abs) {
  if (!(target_mean_abs > 0.0) || !std::isfinite(target_mean_abs)) {
    throw Error(ErrorCode::kInvalidArgument, "target amplitude must be positive");
  }
  if (w.samples.empty()) {
    throw Error(ErrorCode::kDegenerateInput, "cannot normalize an empty waveform");
  }
  double sum_abs = 0.0;
  for (double s : w.samples) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite sample");
    }
    sum_abs += std::abs(s);
  }
  if (sum_abs == 0.0) {
    throw Error(ErrorCode::kDegenerateInput,
                "all-zero waveform has no amplitude to normalize");
  }
  const double mean_abs = sum_abs / static_cast<double>(w.samples.size());
  const double gain = target_mean_abs / mean_abs;
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.reserve(w.samples.size());
  for (double s : w.samples) out.samples.push_back(s * gain);
  return out;
}

Waveform extract_samples(const Waveform& w, std::size_t offset,
                         std::size_t count) {
  if (offset > w.samples.size() || count > w.samples.size() - offset) {
    throw Error(ErrorCode::kOutOfRange,
                "excerpt [" + std::to_string(offset) + ", " +
                    std::to_string(offset + count) + ") exceeds " +
                    std::to_string(w.samples.size()) + " samples");
  }
  Waveform out;
  out.sample_rate = w.sample_rate;
  const auto first = w.samples.begin() + static_cast<std::ptrdiff_t>(offset);
  out.samples.assign(first, first + static_cast<std::ptrdiff_t>(count));
  return out;
}

Waveform extract_excerpt(const Waveform& w, double offset_s, double duration_s) {
  if (!(offset_s >= 0.0) || !(duration_s > 0.0)) {
    throw Error(ErrorCode::kOutOfRange, "excerpt needs offset >= 0 and duration > 0");
  }
  const auto offset = static_cast<std::size_t>(std::llround(offset_s * w.sample_rate));
  const auto count = static_cast<std::size_t>(std::llround(duration_s * w.sample_rate));
  return extract_samples(w, offset, count);
}

}  // namespace mdlscore
