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

// Two-part description lengths of a clustered dataset.
//
// Every point is described either through its cluster (label + Gaussian
// residual code of -log2 q bits) or directly at c bits per coordinate,
// whichever is shorter. A point whose residual code reaches c*m bits is an
// outlier: it is charged exactly c*m bits and carries no label. The label
// code of an inlier in cluster j costs log2(n / l_j), where l_j counts every
// point assigned to j, outliers included. Each nonempty cluster costs 2*c*m
// bits for its mean and variance vectors. All lengths are in bits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mdlscore/cluster.hpp"
#include "mdlscore/spectral.hpp"

namespace mdlscore {

struct PointCode {
  double bits = 0.0;
  bool is_outlier = false;
};

/// -log2 of the diagonal Gaussian density at x.
double neg_log2_density(std::span<const double> x,
                        std::span<const double> centroid,
                        std::span<const double> variance);

/// bits = min(c*m, max(0, -log2 q)); outlier iff -log2 q >= c*m. With
/// `floor_at_zero` off, negative residual code lengths pass through.
PointCode point_code_length(std::span<const double> x,
                            std::span<const double> centroid,
                            std::span<const double> variance, int precision_bits,
                            bool floor_at_zero = true);

struct CodingOptions {
  int precision_bits = 32;
  bool floor_code_lengths = true;
};

struct CodingReport {
  std::vector<double> per_point_code_bits;
  std::vector<bool> outlier_flags;
  double label_info_bits = 0.0;
  double model_bits = 0.0;
  /// Residual codes plus label codes; the model cost is kept separate.
  double total_cost_bits = 0.0;
  std::size_t k_selected = 0;
  std::size_t nonempty_clusters = 0;
  std::size_t outlier_count = 0;
  int precision_bits = 32;
  std::size_t dim = 0;
  std::size_t n = 0;

  /// Full two-part description length: data given the model plus the model.
  double description_bits() const { return total_cost_bits + model_bits; }
};

CodingReport partition_cost(const FrameMatrix& frames, const ClusterModel& model,
                            const CodingOptions& options = {});

/// Label information plus model cost of the chosen partition.
double meaningfulness_bits(const CodingReport& report);

struct SelectionOptions {
  std::size_t k_max = 8;
  CodingOptions coding;
  GmmOptions gmm;
  /// Rank candidate partitions by description_bits() (model included) rather
  /// than total_cost_bits alone.
  bool include_model_cost = true;
};

struct Selection {
  ClusterModel model;  // statistics of the hard partition
  CodingReport report;
  /// Ranking cost for K = 1..k_max (index K-1).
  std::vector<double> cost_by_k;
};

/// Fits a GMM with exactly k components, hardens it, and codes the partition.
Selection partition_for_k(const FrameMatrix& frames, std::size_t k,
                          std::uint64_t seed, const SelectionOptions& options = {});

/// Sweeps K = 1..min(k_max, n) and keeps the cheapest partition; ties go to
/// the smaller K. Requires at least two frames.
Selection select_partition(const FrameMatrix& frames, std::uint64_t seed,
                           const SelectionOptions& options = {});

/// 100 * raw / sum_l (n_l * log2(k_max) + k_max * 2 * c * m_l), clamped to
/// [0, 100].
double normalize_score(double raw_bits_total,
                       std::span<const std::size_t> n_per_level,
                       std::size_t k_max, int precision_bits,
                       std::span<const std::size_t> m_per_level);

struct LevelResult {
  int level = 1;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t k = 0;  // components of the kept partition
  std::size_t nonempty_clusters = 0;
  std::size_t outliers = 0;
  double label_info_bits = 0.0;
  double model_bits = 0.0;
  double total_cost_bits = 0.0;
  double meaningful_bits = 0.0;
  bool skipped = false;
};

struct ScoreCard {
  std::vector<LevelResult> levels;
  double raw_bits_total = 0.0;
  double normalized_score = 0.0;
  double normalization_bits = 0.0;

  std::vector<double> raw_bits_per_level() const;
  std::vector<std::size_t> k_per_level() const;
  std::vector<std::size_t> n_per_level() const;
};

}  // namespace mdlscore
