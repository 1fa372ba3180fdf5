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

// Independent reference implementations used as test oracles. They follow
// the written formulas directly in long double and share no code with the
// library.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

struct Cost {
  std::vector<long double> point_bits;
  std::vector<bool> outliers;
  long double label_bits = 0;
  long double model_bits = 0;
  long double total_bits = 0;  // point bits + label bits
};

// Two-part code of a hard partition. Cluster statistics are the member mean
// and ML variance raised to `floor`.
inline Cost partition_cost(const Rows& x, const std::vector<std::size_t>& labels,
                           std::size_t k, const std::vector<double>& floor, int c,
                           bool clamp_at_zero = true) {
  const std::size_t n = x.size();
  const std::size_t m = x[0].size();
  std::vector<long double> count(k, 0);
  std::vector<std::vector<long double>> mean(k, std::vector<long double>(m, 0));
  std::vector<std::vector<long double>> var(k, std::vector<long double>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    count[labels[i]] += 1;
    for (std::size_t d = 0; d < m; ++d) mean[labels[i]][d] += x[i][d];
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t d = 0; d < m; ++d) {
      if (count[j] > 0) mean[j][d] /= count[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < m; ++d) {
      const long double e = x[i][d] - mean[labels[i]][d];
      var[labels[i]][d] += e * e;
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t d = 0; d < m; ++d) {
      var[j][d] = count[j] > 0 ? var[j][d] / count[j] : 0;
      if (var[j][d] < floor[d]) var[j][d] = floor[d];
    }
  }
  Cost out;
  const long double cap = static_cast<long double>(c) * m;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = labels[i];
    long double nats = 0;
    for (std::size_t d = 0; d < m; ++d) {
      const long double e = x[i][d] - mean[j][d];
      nats += 0.5L * std::log(2.0L * std::numbers::pi_v<long double> * var[j][d]) +
              e * e / (2.0L * var[j][d]);
    }
    const long double bits = nats / std::numbers::ln2_v<long double>;
    const bool outlier = bits >= cap;
    long double coded = bits;
    if (clamp_at_zero && coded < 0) coded = 0;
    if (coded > cap) coded = cap;
    out.point_bits.push_back(coded);
    out.outliers.push_back(outlier);
    out.total_bits += coded;
    if (!outlier) out.label_bits += std::log2(static_cast<long double>(n) / count[j]);
  }
  out.total_bits += out.label_bits;
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] > 0) out.model_bits += 2.0L * c * m;
  }
  return out;
}

inline long double meaningfulness(const Cost& cost) { return cost.label_bits + cost.model_bits; }

// Label information plus model cost, read off a given hard labeling and its
// outlier flags, summed in double in point order.
inline double meaningfulness_of(const std::vector<std::size_t>& labels,
                                const std::vector<bool>& outliers, std::size_t k, int c,
                                std::size_t m) {
  std::vector<std::size_t> count(k, 0);
  for (std::size_t l : labels) ++count[l];
  double label = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!outliers[i]) {
      label += std::log2(static_cast<double>(labels.size()) / static_cast<double>(count[labels[i]]));
    }
  }
  double model = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] > 0) model += 2.0 * c * static_cast<double>(m);
  }
  return label + model;
}

// One-sided DFT magnitudes of one frame, straight from the definition.
inline std::vector<double> dft_magnitudes(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<long double> acc = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const long double angle = -2.0L * std::numbers::pi_v<long double> * k * t / n;
      acc += static_cast<long double>(frame[t]) *
             std::complex<long double>(std::cos(angle), std::sin(angle));
    }
    out[k] = static_cast<double>(std::abs(acc));
  }
  return out;
}

// Katz fractal dimension with planar step lengths between (i, x_i) points.
inline long double katz(const std::vector<double>& x) {
  long double length = 0;
  long double extent = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const long double dy = x[i] - x[i - 1];
    length += std::sqrt(1.0L + dy * dy);
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    const long double dy = x[i] - x[0];
    const long double di = static_cast<long double>(i);
    extent = std::max(extent, std::sqrt(di * di + dy * dy));
  }
  const long double steps = static_cast<long double>(x.size() - 1);
  return std::log10(steps) / (std::log10(steps) + std::log10(extent / length));
}

// Shannon entropy of the normalized cell distribution, as a percentage of
// the maximum for that many cells.
inline long double entropy_percent(const std::vector<double>& cells) {
  long double total = 0;
  for (double v : cells) total += v;
  long double h = 0;
  for (double v : cells) {
    if (v > 0) {
      const long double p = v / total;
      h -= p * std::log2(p);
    }
  }
  if (cells.size() < 2) return 0;
  return 100.0L * h / std::log2(static_cast<long double>(cells.size()));
}

}  // namespace oracle
