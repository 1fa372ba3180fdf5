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
#include <span>
#include <vector>

#include "mdlscore/spectral.hpp"

namespace mdlscore {

/// A fitted partition: K diagonal Gaussians plus the hard assignment of every
/// point. `counts[k]` is the number of points whose assignment is k.
struct ClusterModel {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> weights;    // K mixture weights
  std::vector<double> centroids;  // K x dim, row-major
  std::vector<double> variances;  // K x dim, row-major, each >= floor
  std::vector<std::size_t> assignments;
  std::vector<std::size_t> counts;
  /// Total mixture log-likelihood of the data under the final parameters (nats).
  double log_likelihood = 0.0;

  // EM diagnostics. The trace holds the log-likelihood evaluated before every
  // M-step plus the final value; entries listed in `reseed_iterations` follow
  // an empty-component reseed, after which the trace may drop.
  std::vector<double> log_likelihood_trace;
  std::vector<std::size_t> reseed_iterations;
  std::size_t iterations = 0;
  bool converged = false;

  std::span<const double> centroid(std::size_t i) const {
    return {centroids.data() + i * dim, dim};
  }
  std::span<const double> variance(std::size_t i) const {
    return {variances.data() + i * dim, dim};
  }
  std::size_t nonempty_clusters() const;
};

struct GmmOptions {
  double tol = 1e-3;  // on the per-point mean log-likelihood gain
  std::size_t max_iter = 100;
  std::size_t restarts = 10;
};

/// Per-dimension variance floor: 1e-6 * (global variance + 1e-12).
std::vector<double> variance_floor(const FrameMatrix& frames);

/// k-means++ seeding followed by Lloyd iterations (at most 100). Variances are
/// the within-cluster ML variances, floored; weights are cluster fractions.
ClusterModel kmeans_init(const FrameMatrix& frames, std::size_t k,
                         std::uint64_t seed);

/// One EM run from a k-means start.
ClusterModel fit_gmm_once(const FrameMatrix& frames, std::size_t k,
                          std::uint64_t seed, const GmmOptions& options = {});

/// Best of `options.restarts` EM runs (seeds seed, seed+1, ...) by mixture
/// log-likelihood; ties go to the earliest run.
ClusterModel fit_gmm(const FrameMatrix& frames, std::size_t k,
                     std::uint64_t seed, const GmmOptions& options = {});

/// Responsibility argmax per point, ties to the lowest index.
std::vector<std::size_t> hard_assign(const FrameMatrix& frames,
                                     const ClusterModel& model);

double mixture_log_likelihood(const FrameMatrix& frames,
                              const ClusterModel& model);

/// Cluster statistics of a fixed hard partition: centroid = member mean,
/// variance = member ML variance (floored). Empty clusters keep a zero
/// centroid and floor variance. Weights are member fractions.
ClusterModel model_from_partition(const FrameMatrix& frames,
                                  std::span<const std::size_t> assignments,
                                  std::size_t k,
                                  std::span<const double> floor);

}  // namespace mdlscore
