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

#include "mdlscore/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mdlscore/error.hpp"

namespace mdlscore {

FrameMatrix FrameMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                   int level) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  FrameMatrix m(rows.size(), dim, level);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw Error(ErrorCode::kInvalidArgument, "rows differ in dimension");
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

std::size_t spectrogram_frame_count(std::size_t num_samples,
                                    const SpectrogramOptions& options) {
  if (options.window == 0 || options.overlap >= options.window ||
      num_samples < options.window) {
    return 0;
  }
  const std::size_t hop = options.window - options.overlap;
  return (num_samples - options.window) / hop + 1;
}

FrameMatrix spectrogram_frames(const Waveform& w, const SpectrogramOptions& options) {
  const std::size_t window = options.window;
  if (window == 0 || options.overlap >= window) {
    throw Error(ErrorCode::kInvalidArgument, "need window > overlap >= 0");
  }
  if (w.samples.size() < window) {
    throw Error(ErrorCode::kDegenerateInput,
                "waveform of " + std::to_string(w.samples.size()) +
                    " samples is shorter than the " + std::to_string(window) +
                    "-sample window");
  }
  const std::size_t hop = window - options.overlap;
  const std::size_t bins = window / 2 + 1;
  const std::size_t n = spectrogram_frame_count(w.samples.size(), options);

  // Twiddles indexed by (bin * t) mod window keep the table at `window` entries.
  std::vector<double> cos_table(window);
  std::vector<double> sin_table(window);
  for (std::size_t j = 0; j < window; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) /
                         static_cast<double>(window);
    cos_table[j] = std::cos(angle);
    sin_table[j] = std::sin(angle);
  }

  FrameMatrix frames(n, bins, 1);
  for (std::size_t f = 0; f < n; ++f) {
    const double* x = w.samples.data() + f * hop;
    auto out = frames.row(f);
    for (std::size_t k = 0; k < bins; ++k) {
      double re = 0.0;
      double im = 0.0;
      std::size_t idx = 0;
      for (std::size_t t = 0; t < window; ++t) {
        re += x[t] * cos_table[idx];
        im -= x[t] * sin_table[idx];
        idx += k;
        if (idx >= window) idx -= window;
      }
      const double mag = std::hypot(re, im);
      out[k] = options.log_magnitude ? std::log1p(mag) : mag;
    }
  }
  return frames;
}

}  // namespace mdlscore
