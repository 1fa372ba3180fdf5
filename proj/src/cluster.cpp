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

#include "mdlscore/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mdlscore/error.hpp"
#include "mdlscore/rng.hpp"

namespace mdlscore {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)
constexpr std::size_t kMaxLloydIterations = 100;
// A component whose responsibility mass falls below this is considered empty.
constexpr double kEmptyMass = 1e-10;

void check_input(const FrameMatrix& frames, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "K must be at least 1");
  if (k > frames.rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "K=" + std::to_string(k) + " exceeds the " +
                    std::to_string(frames.rows()) + " available points");
  }
  if (frames.dim() == 0) throw Error(ErrorCode::kInvalidArgument, "zero-dimensional frames");
  for (double v : frames.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite frame value");
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

std::vector<double> global_variance(const FrameMatrix& frames) {
  const std::size_t n = frames.rows();
  const std::size_t m = frames.dim();
  std::vector<double> mean(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = frames.row(i);
    for (std::size_t d = 0; d < m; ++d) mean[d] += x[d];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  std::vector<double> var(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = frames.row(i);
    for (std::size_t d = 0; d < m; ++d) {
      const double diff = x[d] - mean[d];
      var[d] += diff * diff;
    }
  }
  for (double& v : var) v /= static_cast<double>(n);
  return var;
}

// Writes per-point, per-component log(w_k N(x_i | k)) into `logp` (n x K) and
// returns the per-point log-sum-exp values through `point_ll`.
void component_log_densities(const FrameMatrix& frames, const ClusterModel& model,
                             std::vector<double>& logp,
                             std::vector<double>& point_ll) {
  const std::size_t n = frames.rows();
  const std::size_t m = frames.dim();
  const std::size_t k = model.k;
  std::vector<double> constant(k);
  std::vector<double> inv_var(k * m);
  for (std::size_t c = 0; c < k; ++c) {
    double log_det = 0.0;
    for (std::size_t d = 0; d < m; ++d) {
      const double v = model.variances[c * m + d];
      log_det += std::log(v);
      inv_var[c * m + d] = 1.0 / v;
    }
    const double log_w = model.weights[c] > 0.0
                             ? std::log(model.weights[c])
                             : -std::numeric_limits<double>::infinity();
    constant[c] = log_w - 0.5 * (static_cast<double>(m) * kLog2Pi + log_det);
  }
  logp.resize(n * k);
  point_ll.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = frames.row(i).data();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double* mu = model.centroids.data() + c * m;
      const double* iv = inv_var.data() + c * m;
      double q = 0.0;
      for (std::size_t d = 0; d < m; ++d) {
        const double diff = x[d] - mu[d];
        q += diff * diff * iv[d];
      }
      const double lp = constant[c] - 0.5 * q;
      logp[i * k + c] = lp;
      best = std::max(best, lp);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += std::exp(logp[i * k + c] - best);
    point_ll[i] = best + std::log(s);
  }
}

std::vector<std::size_t> argmax_rows(const std::vector<double>& logp, std::size_t n,
                                     std::size_t k) {
  std::vector<std::size_t> labels(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (logp[i * k + c] > logp[i * k + best]) best = c;
    }
    labels[i] = best;
  }
  return labels;
}

void fill_counts(ClusterModel& model) {
  model.counts.assign(model.k, 0);
  for (std::size_t a : model.assignments) ++model.counts[a];
}

}  // namespace

std::size_t ClusterModel::nonempty_clusters() const {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
}

std::vector<double> variance_floor(const FrameMatrix& frames) {
  auto var = global_variance(frames);
  for (double& v : var) v = 1e-6 * (v + 1e-12);
  return var;
}

ClusterModel model_from_partition(const FrameMatrix& frames,
                                  std::span<const std::size_t> assignments,
                                  std::size_t k, std::span<const double> floor) {
  const std::size_t n = frames.rows();
  const std::size_t m = frames.dim();
  if (assignments.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "one label per frame required");
  }
  if (floor.size() != m) throw Error(ErrorCode::kInvalidArgument, "floor dimension mismatch");
  ClusterModel model;
  model.k = k;
  model.dim = m;
  model.assignments.assign(assignments.begin(), assignments.end());
  for (std::size_t a : assignments) {
    if (a >= k) throw Error(ErrorCode::kInvalidArgument, "label out of range");
  }
  fill_counts(model);
  model.centroids.assign(k * m, 0.0);
  model.variances.assign(k * m, 0.0);
  model.weights.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = frames.row(i);
    double* mu = model.centroids.data() + assignments[i] * m;
    for (std::size_t d = 0; d < m; ++d) mu[d] += x[d];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (model.counts[c] == 0) continue;
    for (std::size_t d = 0; d < m; ++d) {
      model.centroids[c * m + d] /= static_cast<double>(model.counts[c]);
    }
    model.weights[c] = static_cast<double>(model.counts[c]) / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = frames.row(i);
    const std::size_t c = assignments[i];
    for (std::size_t d = 0; d < m; ++d) {
      const double diff = x[d] - model.centroids[c * m + d];
      model.variances[c * m + d] += diff * diff;
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < m; ++d) {
      double& v = model.variances[c * m + d];
      if (model.counts[c] > 0) v /= static_cast<double>(model.counts[c]);
      v = std::max(v, floor[d]);
    }
  }
  return model;
}

ClusterModel kmeans_init(const FrameMatrix& frames, std::size_t k, std::uint64_t seed) {
  check_input(frames, k);
  const std::size_t n = frames.rows();
  const std::size_t m = frames.dim();
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<double> centers;
  centers.reserve(k * m);
  const auto first = frames.row(rng.index(n));
  centers.insert(centers.end(), first.begin(), first.end());
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(frames.row(i), first);
  while (centers.size() < k * m) {
    double total = 0.0;
    for (double d : nearest) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest[i];
        if (acc > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.index(n);
    }
    const auto c = frames.row(pick);
    centers.insert(centers.end(), c.begin(), c.end());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(frames.row(i), c));
    }
  }

  // Lloyd iterations.
  std::vector<std::size_t> labels(n, 0);
  std::vector<std::size_t> previous;
  std::vector<double> dist(n);
  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(frames.row(i), {centers.data() + c * m, m});
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[i] = best;
      dist[i] = best_d;
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t l : labels) ++counts[l];
    // Empty clusters take the point farthest from its own centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) break;  // cannot happen while k <= n
      --counts[labels[far]];
      labels[far] = c;
      dist[far] = 0.0;
      ++counts[c];
    }
    std::fill(centers.begin(), centers.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = frames.row(i);
      double* mu = centers.data() + labels[i] * m;
      for (std::size_t d = 0; d < m; ++d) mu[d] += x[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t d = 0; d < m; ++d) centers[c * m + d] /= static_cast<double>(counts[c]);
    }
    if (labels == previous) break;
    previous = labels;
  }

  const auto floor = variance_floor(frames);
  ClusterModel model = model_from_partition(frames, labels, k, floor);
  model.log_likelihood = mixture_log_likelihood(frames, model);
  return model;
}

double mixture_log_likelihood(const FrameMatrix& frames, const ClusterModel& model) {
  std::vector<double> logp;
  std::vector<double> point_ll;
  component_log_densities(frames, model, logp, point_ll);
  double total = 0.0;
  for (double v : point_ll) total += v;
  return total;
}

std::vector<std::size_t> hard_assign(const FrameMatrix& frames, const ClusterModel& model) {
  std::vector<double> logp;
  std::vector<double> point_ll;
  component_log_densities(frames, model, logp, point_ll);
  return argmax_rows(logp, frames.rows(), model.k);
}

ClusterModel fit_gmm_once(const FrameMatrix& frames, std::size_t k, std::uint64_t seed,
                          const GmmOptions& options) {
  ClusterModel model = kmeans_init(frames, k, seed);
  const std::size_t n = frames.rows();
  const std::size_t m = frames.dim();
  const auto floor = variance_floor(frames);
  auto reseed_variance = global_variance(frames);
  for (std::size_t d = 0; d < m; ++d) {
    reseed_variance[d] = std::max(reseed_variance[d], floor[d]);
  }

  std::vector<double> logp;
  std::vector<double> point_ll;
  std::vector<double> mass(k);

  auto e_step = [&] {
    component_log_densities(frames, model, logp, point_ll);
    double total = 0.0;
    for (double v : point_ll) total += v;
    // logp becomes responsibilities.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        logp[i * k + c] = std::exp(logp[i * k + c] - point_ll[i]);
      }
    }
    return total;
  };

  double ll = e_step();
  model.log_likelihood_trace.assign(1, ll);
  model.reseed_iterations.clear();
  model.converged = false;
  model.iterations = 0;

  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    // M-step.
    std::fill(mass.begin(), mass.end(), 0.0);
    std::fill(model.centroids.begin(), model.centroids.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = frames.row(i);
      for (std::size_t c = 0; c < k; ++c) {
        const double r = logp[i * k + c];
        if (r == 0.0) continue;
        mass[c] += r;
        double* mu = model.centroids.data() + c * m;
        for (std::size_t d = 0; d < m; ++d) mu[d] += r * x[d];
      }
    }
    bool reseeded = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (mass[c] < kEmptyMass) continue;
      for (std::size_t d = 0; d < m; ++d) model.centroids[c * m + d] /= mass[c];
    }
    std::fill(model.variances.begin(), model.variances.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = frames.row(i);
      for (std::size_t c = 0; c < k; ++c) {
        const double r = logp[i * k + c];
        if (r == 0.0 || mass[c] < kEmptyMass) continue;
        const double* mu = model.centroids.data() + c * m;
        double* var = model.variances.data() + c * m;
        for (std::size_t d = 0; d < m; ++d) {
          const double diff = x[d] - mu[d];
          var[d] += r * diff * diff;
        }
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (mass[c] < kEmptyMass) {
        // Re-seed at the point the current mixture explains worst.
        const auto worst = static_cast<std::size_t>(
            std::min_element(point_ll.begin(), point_ll.end()) - point_ll.begin());
        const auto x = frames.row(worst);
        std::copy(x.begin(), x.end(), model.centroids.begin() + c * m);
        std::copy(reseed_variance.begin(), reseed_variance.end(),
                  model.variances.begin() + c * m);
        model.weights[c] = 1.0 / static_cast<double>(n);
        point_ll[worst] = std::numeric_limits<double>::infinity();
        reseeded = true;
        continue;
      }
      model.weights[c] = mass[c] / static_cast<double>(n);
      for (std::size_t d = 0; d < m; ++d) {
        double& v = model.variances[c * m + d];
        v = std::max(v / mass[c], floor[d]);
      }
    }
    if (reseeded) {
      double total = 0.0;
      for (double w : model.weights) total += w;
      for (double& w : model.weights) w /= total;
      model.reseed_iterations.push_back(iter);
    }

    const double next = e_step();
    model.log_likelihood_trace.push_back(next);
    model.iterations = iter;
    const double gain = (next - ll) / static_cast<double>(n);
    ll = next;
    if (!reseeded && std::abs(gain) < options.tol) {
      model.converged = true;
      break;
    }
  }

  model.log_likelihood = ll;
  model.assignments = hard_assign(frames, model);
  fill_counts(model);
  return model;
}

ClusterModel fit_gmm(const FrameMatrix& frames, std::size_t k, std::uint64_t seed,
                     const GmmOptions& options) {
  check_input(frames, k);
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  ClusterModel best;
  bool have_best = false;
  for (std::size_t r = 0; r < restarts; ++r) {
    ClusterModel candidate = fit_gmm_once(frames, k, seed + r, options);
    if (!have_best || candidate.log_likelihood > best.log_likelihood) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  return best;
}

}  // namespace mdlscore
