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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdlscore/mdl.hpp"
#include "mdlscore/spectral.hpp"

namespace mdlscore {

inline constexpr int kMaxLevels = 3;

struct LevelSpec {
  int level = 1;
  /// Level-1 frames covered by one point at this level (1, 2, 4).
  std::size_t chunk_size = 1;
  std::size_t input_dim = 0;
};

struct MultilevelOptions {
  SelectionOptions selection;
  int levels = kMaxLevels;
  /// Skip the K sweep and use this many components at every level.
  std::optional<std::size_t> fixed_k;
  /// Build level 3 from level-1 labels in chunks of 4 instead of level-2
  /// labels in chunks of 2.
  bool level3_from_level1 = false;
};

/// Non-overlapping chunks of `chunk` consecutive labels, each turned into a
/// k_prev-dimensional histogram. A trailing partial chunk is dropped.
FrameMatrix label_count_frames(std::span<const std::size_t> labels,
                               std::size_t k_prev, std::size_t chunk,
                               int level = 2);

/// Scores up to three levels and sums their meaningful bits. Levels with
/// fewer than two points are recorded as skipped and contribute zero.
ScoreCard multilevel_score(const FrameMatrix& level1, std::uint64_t seed,
                           const MultilevelOptions& options = {});

/// multilevel_score with the K sweep replaced by a fixed K (clipped to n).
ScoreCard fixed_k_score(const FrameMatrix& level1, std::size_t k_fixed,
                        std::uint64_t seed, MultilevelOptions options = {});

}  // namespace mdlscore
