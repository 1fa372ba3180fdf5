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

#include <cstddef>
#include <span>
#include <vector>

#include "mdlscore/audio_io.hpp"

namespace mdlscore {

/// Ordered set of n points of equal dimension, stored row-major.
class FrameMatrix {
 public:
  FrameMatrix() = default;
  FrameMatrix(std::size_t rows, std::size_t dim, int level = 1)
      : data_(rows * dim, 0.0), rows_(rows), dim_(dim), level_(level) {}

  static FrameMatrix from_rows(const std::vector<std::vector<double>>& rows,
                               int level = 1);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  int level() const { return level_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  double& at(std::size_t i, std::size_t d) { return data_[i * dim_ + d]; }
  double at(std::size_t i, std::size_t d) const { return data_[i * dim_ + d]; }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  friend bool operator==(const FrameMatrix&, const FrameMatrix&) = default;

 private:
  std::vector<double> data_;
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  int level_ = 1;
};

struct SpectrogramOptions {
  std::size_t window = 30;
  std::size_t overlap = 3;
  /// log(1 + |X|) instead of |X|. Off by default.
  bool log_magnitude = false;
};

/// One-sided magnitude spectrum of successive rectangular windows.
/// hop = window - overlap; trailing samples that do not fill a window are
/// dropped; each frame has window/2 + 1 bins.
FrameMatrix spectrogram_frames(const Waveform& w,
                               const SpectrogramOptions& options = {});

std::size_t spectrogram_frame_count(std::size_t num_samples,
                                    const SpectrogramOptions& options = {});

}  // namespace mdlscore
