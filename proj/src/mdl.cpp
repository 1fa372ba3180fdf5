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

#include "mdlscore/mdl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mdlscore/error.hpp"

namespace mdlscore {

double neg_log2_density(std::span<const double> x, std::span<const double> centroid,
                        std::span<const double> variance) {
  if (x.size() != centroid.size() || x.size() != variance.size()) {
    throw Error(ErrorCode::kInvalidArgument, "dimension mismatch in density");
  }
  double nats = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!std::isfinite(x[d]) || !std::isfinite(centroid[d]) ||
        !std::isfinite(variance[d]) || !(variance[d] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "density needs finite inputs and positive variances");
    }
    const double diff = x[d] - centroid[d];
    nats += 0.5 * (std::log(2.0 * std::numbers::pi * variance[d]) +
                   diff * diff / variance[d]);
  }
  return nats / std::numbers::ln2;
}

PointCode point_code_length(std::span<const double> x, std::span<const double> centroid,
                            std::span<const double> variance, int precision_bits,
                            bool floor_at_zero) {
  if (precision_bits <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "precision must be positive");
  }
  const double raw = neg_log2_density(x, centroid, variance);
  const double cap = static_cast<double>(precision_bits) * static_cast<double>(x.size());
  PointCode code;
  code.is_outlier = raw >= cap;
  if (code.is_outlier) {
    code.bits = cap;
  } else {
    code.bits = floor_at_zero ? std::max(0.0, raw) : raw;
  }
  return code;
}

CodingReport partition_cost(const FrameMatrix& frames, const ClusterModel& model,
                            const CodingOptions& options) {
  const std::size_t n = frames.rows();
  const std::size_t m = frames.dim();
  if (model.dim != m || model.assignments.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "model does not match frames");
  }
  std::vector<std::size_t> counts(model.k, 0);
  for (std::size_t a : model.assignments) {
    if (a >= model.k) throw Error(ErrorCode::kInvalidArgument, "label out of range");
    ++counts[a];
  }

  CodingReport report;
  report.n = n;
  report.dim = m;
  report.precision_bits = options.precision_bits;
  report.k_selected = model.k;
  report.per_point_code_bits.resize(n);
  report.outlier_flags.resize(n);
  double residual_bits = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = model.assignments[i];
    const PointCode code =
        point_code_length(frames.row(i), model.centroid(label), model.variance(label),
                          options.precision_bits, options.floor_code_lengths);
    report.per_point_code_bits[i] = code.bits;
    report.outlier_flags[i] = code.is_outlier;
    residual_bits += code.bits;
    if (code.is_outlier) {
      ++report.outlier_count;
    } else {
      report.label_info_bits += std::log2(static_cast<double>(n) /
                                          static_cast<double>(counts[label]));
    }
  }
  report.nonempty_clusters = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  report.model_bits = 2.0 * options.precision_bits * static_cast<double>(m) *
                      static_cast<double>(report.nonempty_clusters);
  report.total_cost_bits = residual_bits + report.label_info_bits;
  return report;
}

double meaningfulness_bits(const CodingReport& report) {
  return report.label_info_bits + report.model_bits;
}

Selection partition_for_k(const FrameMatrix& frames, std::size_t k, std::uint64_t seed,
                          const SelectionOptions& options) {
  const ClusterModel gmm = fit_gmm(frames, k, seed, options.gmm);
  Selection s;
  s.model = model_from_partition(frames, gmm.assignments, k, variance_floor(frames));
  s.model.log_likelihood = gmm.log_likelihood;
  s.model.log_likelihood_trace = gmm.log_likelihood_trace;
  s.model.reseed_iterations = gmm.reseed_iterations;
  s.model.iterations = gmm.iterations;
  s.model.converged = gmm.converged;
  s.report = partition_cost(frames, s.model, options.coding);
  return s;
}

Selection select_partition(const FrameMatrix& frames, std::uint64_t seed,
                           const SelectionOptions& options) {
  if (frames.rows() < 2) {
    throw Error(ErrorCode::kDegenerateInput, "partition selection needs at least 2 frames");
  }
  if (options.k_max == 0) throw Error(ErrorCode::kInvalidArgument, "k_max must be >= 1");
  const std::size_t k_limit = std::min(options.k_max, frames.rows());
  Selection best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> costs;
  for (std::size_t k = 1; k <= k_limit; ++k) {
    Selection candidate = partition_for_k(frames, k, seed, options);
    const double cost = options.include_model_cost ? candidate.report.description_bits()
                                                   : candidate.report.total_cost_bits;
    costs.push_back(cost);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(candidate);
    }
  }
  best.cost_by_k = std::move(costs);
  return best;
}

double normalize_score(double raw_bits_total, std::span<const std::size_t> n_per_level,
                       std::size_t k_max, int precision_bits,
                       std::span<const std::size_t> m_per_level) {
  if (n_per_level.size() != m_per_level.size()) {
    throw Error(ErrorCode::kInvalidArgument, "per-level lists differ in length");
  }
  if (k_max == 0) throw Error(ErrorCode::kInvalidArgument, "k_max must be >= 1");
  const double log_k = std::log2(static_cast<double>(k_max));
  double denominator = 0.0;
  for (std::size_t l = 0; l < n_per_level.size(); ++l) {
    denominator += static_cast<double>(n_per_level[l]) * log_k +
                   static_cast<double>(k_max) * 2.0 * precision_bits *
                       static_cast<double>(m_per_level[l]);
  }
  if (!(denominator > 0.0)) return 0.0;
  return std::clamp(100.0 * raw_bits_total / denominator, 0.0, 100.0);
}

std::vector<double> ScoreCard::raw_bits_per_level() const {
  std::vector<double> out;
  for (const auto& l : levels) out.push_back(l.meaningful_bits);
  return out;
}

std::vector<std::size_t> ScoreCard::k_per_level() const {
  std::vector<std::size_t> out;
  for (const auto& l : levels) out.push_back(l.k);
  return out;
}

std::vector<std::size_t> ScoreCard::n_per_level() const {
  std::vector<std::size_t> out;
  for (const auto& l : levels) out.push_back(l.n);
  return out;
}

}  // namespace mdlscore
