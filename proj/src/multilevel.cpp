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

#include "mdlscore/multilevel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdlscore/error.hpp"

namespace mdlscore {
namespace {

LevelResult describe(int level, const FrameMatrix& frames, const Selection& s) {
  LevelResult r;
  r.level = level;
  r.n = frames.rows();
  r.dim = frames.dim();
  r.k = s.report.k_selected;
  r.nonempty_clusters = s.report.nonempty_clusters;
  r.outliers = s.report.outlier_count;
  r.label_info_bits = s.report.label_info_bits;
  r.model_bits = s.report.model_bits;
  r.total_cost_bits = s.report.total_cost_bits;
  r.meaningful_bits = meaningfulness_bits(s.report);
  return r;
}

Selection run_level(const FrameMatrix& frames, std::uint64_t seed,
                    const MultilevelOptions& options) {
  if (options.fixed_k) {
    const std::size_t k = std::min(*options.fixed_k, frames.rows());
    return partition_for_k(frames, k, seed, options.selection);
  }
  return select_partition(frames, seed, options.selection);
}

}  // namespace

FrameMatrix label_count_frames(std::span<const std::size_t> labels, std::size_t k_prev,
                               std::size_t chunk, int level) {
  if (chunk < 2) throw Error(ErrorCode::kInvalidArgument, "chunk must be at least 2");
  if (k_prev == 0) throw Error(ErrorCode::kInvalidArgument, "previous K must be >= 1");
  if (labels.size() < chunk) {
    throw Error(ErrorCode::kDegenerateInput,
                std::to_string(labels.size()) + " labels do not fill a chunk of " +
                    std::to_string(chunk));
  }
  const std::size_t n = labels.size() / chunk;
  FrameMatrix frames(n, k_prev, level);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < chunk; ++j) {
      const std::size_t label = labels[i * chunk + j];
      if (label >= k_prev) throw Error(ErrorCode::kInvalidArgument, "label out of range");
      frames.at(i, label) += 1.0;
    }
  }
  return frames;
}

ScoreCard multilevel_score(const FrameMatrix& level1, std::uint64_t seed,
                           const MultilevelOptions& options) {
  if (options.levels < 1 || options.levels > kMaxLevels) {
    throw Error(ErrorCode::kInvalidArgument, "levels must be 1, 2 or 3");
  }
  if (level1.rows() < 2) {
    throw Error(ErrorCode::kDegenerateInput,
                "need at least 2 spectrogram frames, got " + std::to_string(level1.rows()));
  }
  if (options.fixed_k && *options.fixed_k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "fixed K must be >= 1");
  }

  ScoreCard card;
  std::vector<std::vector<std::size_t>> labels;
  std::vector<std::size_t> ks;

  {
    const Selection s = run_level(level1, seed, options);
    card.levels.push_back(describe(1, level1, s));
    labels.push_back(s.model.assignments);
    ks.push_back(s.model.k);
  }

  bool blocked = false;
  for (int level = 2; level <= options.levels; ++level) {
    // Level 3 reads level-2 labels in pairs, or level-1 labels in fours.
    const bool from_level1 = level == 3 && options.level3_from_level1;
    const std::size_t source = from_level1 ? 0 : labels.size() - 1;
    const std::size_t chunk = from_level1 ? 4 : 2;
    LevelResult skipped;
    skipped.level = level;
    skipped.skipped = true;
    if (blocked || labels[source].size() < chunk) {
      skipped.n = blocked ? 0 : labels[source].size() / chunk;
      card.levels.push_back(skipped);
      blocked = true;
      continue;
    }
    const FrameMatrix frames = label_count_frames(labels[source], ks[source], chunk, level);
    skipped.n = frames.rows();
    skipped.dim = frames.dim();
    if (frames.rows() < 2) {
      card.levels.push_back(skipped);
      blocked = true;
      continue;
    }
    const Selection s = run_level(frames, seed, options);
    card.levels.push_back(describe(level, frames, s));
    labels.push_back(s.model.assignments);
    ks.push_back(s.model.k);
  }

  for (const auto& l : card.levels) card.raw_bits_total += l.meaningful_bits;

  // The denominator always spans the full three-level ladder with the largest
  // admissible dimension above level 1, so it depends only on n1 and config.
  const std::size_t k_cap =
      std::max(options.selection.k_max, options.fixed_k.value_or(0));
  const std::size_t n1 = level1.rows();
  const std::size_t n_ladder[kMaxLevels] = {n1, n1 / 2, n1 / 4};
  const std::size_t m_ladder[kMaxLevels] = {level1.dim(), k_cap, k_cap};
  card.normalized_score =
      normalize_score(card.raw_bits_total, n_ladder, k_cap,
                      options.selection.coding.precision_bits, m_ladder);
  const double log_k = std::log2(static_cast<double>(k_cap));
  for (int l = 0; l < kMaxLevels; ++l) {
    card.normalization_bits += static_cast<double>(n_ladder[l]) * log_k +
                               static_cast<double>(k_cap) * 2.0 *
                                   options.selection.coding.precision_bits *
                                   static_cast<double>(m_ladder[l]);
  }
  return card;
}

ScoreCard fixed_k_score(const FrameMatrix& level1, std::size_t k_fixed, std::uint64_t seed,
                        MultilevelOptions options) {
  options.fixed_k = k_fixed;
  return multilevel_score(level1, seed, options);
}

}  // namespace mdlscore
