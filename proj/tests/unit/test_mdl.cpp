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


#include <cmath>
#include <limits>
#include <vector>

#include "../support/blobs.hpp"
#include "../support/oracle.hpp"
#include "doctest.h"
#include "mdlscore/cluster.hpp"
#include "mdlscore/error.hpp"
#include "mdlscore/mdl.hpp"

using namespace mdlscore;

namespace {

oracle::Rows rows_of(const FrameMatrix& f) {
  oracle::Rows r(f.rows());
  for (std::size_t i = 0; i < f.rows(); ++i) r[i].assign(f.row(i).begin(), f.row(i).end());
  return r;
}

ClusterModel partition_model(const FrameMatrix& f, const std::vector<std::size_t>& labels,
                             std::size_t k) {
  return model_from_partition(f, labels, k, variance_floor(f));
}

void check_against_oracle(const FrameMatrix& f, const std::vector<std::size_t>& labels,
                          std::size_t k, int c, bool clamp = true) {
  const auto model = partition_model(f, labels, k);
  CodingOptions opts;
  opts.precision_bits = c;
  opts.floor_code_lengths = clamp;
  const auto report = partition_cost(f, model, opts);
  const auto ref = oracle::partition_cost(rows_of(f), labels, k, variance_floor(f), c, clamp);
  for (std::size_t i = 0; i < f.rows(); ++i) {
    CHECK(std::abs(report.per_point_code_bits[i] - static_cast<double>(ref.point_bits[i])) <= 1e-9);
    CHECK(report.outlier_flags[i] == ref.outliers[i]);
  }
  CHECK(std::abs(report.label_info_bits - static_cast<double>(ref.label_bits)) <= 1e-9);
  CHECK(std::abs(report.total_cost_bits - static_cast<double>(ref.total_bits)) <= 1e-9);
  CHECK(report.model_bits == static_cast<double>(ref.model_bits));
  CHECK(std::abs(meaningfulness_bits(report) - static_cast<double>(oracle::meaningfulness(ref))) <= 1e-9);
  CHECK(meaningfulness_bits(report) ==
        oracle::meaningfulness_of(labels, report.outlier_flags, k, c, f.dim()));
}

}  // namespace

TEST_CASE("a point ten deviations out in one dimension is an outlier at c=32") {
  const std::vector<double> x{10.0}, mu{0.0}, var{1.0};
  const double expected = (50.0 + 0.5 * std::log(2.0 * std::numbers::pi)) / std::log(2.0);
  CHECK(neg_log2_density(x, mu, var) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::abs(neg_log2_density(x, mu, var) - 73.47) < 0.01);
  const auto code = point_code_length(x, mu, var, 32);
  CHECK(code.bits == 32.0);
  CHECK(code.is_outlier);
}

TEST_CASE("a far 64-dimensional point costs 64 x 32 = 2048 bits") {
  const std::vector<double> x(64, 1e200), mu(64, 0.0), var(64, 1.0);
  const auto code = point_code_length(x, mu, var, 32);
  CHECK(code.bits == 2048.0);
  CHECK(code.is_outlier);
}

TEST_CASE("a point at its centroid costs minus the log peak density") {
  const std::vector<double> x{3.0, -1.0}, var{4.0, 9.0};
  const auto code = point_code_length(x, x, var, 32);
  const double peak = 0.5 * std::log2(2.0 * std::numbers::pi * 4.0) +
                      0.5 * std::log2(2.0 * std::numbers::pi * 9.0);
  CHECK(code.bits == doctest::Approx(peak).epsilon(1e-14));
  CHECK(code.bits >= 0.0);
  CHECK_FALSE(code.is_outlier);
}

TEST_CASE("code lengths are floored at zero unless disabled") {
  const std::vector<double> x{0.0}, var{1e-6};
  CHECK(point_code_length(x, x, var, 32).bits == 0.0);
  CHECK(point_code_length(x, x, var, 32, false).bits < 0.0);
}

TEST_CASE("outlier threshold counts equality as an outlier") {
  const std::vector<double> mu{0.0}, var{1.0};
  // -log2 q = (ln(2 pi)/2 + d^2/2) / ln 2; pick c so that the cap equals it.
  const double d = 2.0;
  const double bits = neg_log2_density(std::vector<double>{d}, mu, var);
  const double c = std::ceil(bits);
  const double gap = c * std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi);
  const double exact = std::sqrt(2.0 * gap);
  const auto at = point_code_length(std::vector<double>{exact}, mu, var, static_cast<int>(c));
  const auto below = point_code_length(std::vector<double>{exact * (1 - 1e-9)}, mu, var,
                                       static_cast<int>(c));
  CHECK_FALSE(below.is_outlier);
  if (neg_log2_density(std::vector<double>{exact}, mu, var) >= c) CHECK(at.is_outlier);
}

TEST_CASE("partition_cost matches the brute-force transcription") {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.index(199);
    const std::size_t m = 1 + rng.index(16);
    const std::size_t k = 1 + rng.index(8);
    FrameMatrix f(n, m);
    const double spread = std::pow(10.0, rng.uniform() * 4.0 - 2.0);
    for (double& v : f.values()) v = spread * rng.normal();
    std::vector<std::size_t> labels(n);
    for (auto& l : labels) l = rng.index(k);
    // A few far points so the outlier branch is exercised.
    for (std::size_t j = 0; j < 3 && j < n; ++j) f.at(rng.index(n), 0) += 1e3 * spread;
    const int c = rng.index(2) ? 32 : static_cast<int>(1 + rng.index(8));
    check_against_oracle(f, labels, k, c, trial % 3 != 0);
  }
}

TEST_CASE("label information examples") {
  SUBCASE("identical points in one cluster carry no label information") {
    const FrameMatrix f(50, 3);
    const auto report = partition_cost(f, partition_model(f, std::vector<std::size_t>(50, 0), 1));
    CHECK(report.label_info_bits == 0.0);
    CHECK(report.outlier_count == 0);
  }
  SUBCASE("two clusters of fifty carry one bit each") {
    const auto b = testsupport::blobs(1, 100, 2, 16, 10.0);
    const auto report = partition_cost(b.frames, partition_model(b.frames, b.labels, 2));
    CHECK(report.outlier_count == 0);
    CHECK(report.label_info_bits == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(meaningfulness_bits(report) == doctest::Approx(2148.0).epsilon(1e-12));
  }
}

TEST_CASE("an injected outlier costs exactly c*m bits and no label bits") {
  const auto b = testsupport::blobs(4, 99, 1, 16, 0.0);
  FrameMatrix f(100, 16);
  for (std::size_t i = 0; i < 99; ++i) {
    for (std::size_t d = 0; d < 16; ++d) f.at(i, d) = b.frames.at(i, d);
  }
  for (std::size_t d = 0; d < 16; ++d) f.at(99, d) = 1e4;
  const std::vector<std::size_t> labels(100, 0);
  const auto ref = oracle::partition_cost(rows_of(f), labels, 1, variance_floor(f), 32);
  REQUIRE(ref.outliers[99]);
  const auto report = partition_cost(f, partition_model(f, labels, 1));
  CHECK(report.per_point_code_bits[99] == 512.0);
  CHECK(report.outlier_flags[99]);
  CHECK(report.outlier_count == 1);
  // 99 inliers of a 100-point cluster: each contributes log2(100/100) = 0.
  CHECK(report.label_info_bits == 0.0);
  CHECK(report.model_bits == 1024.0);
}

TEST_CASE("meaningfulness examples") {
  const FrameMatrix f(20, 16);
  const auto one = partition_cost(f, partition_model(f, std::vector<std::size_t>(20, 0), 1));
  CHECK(meaningfulness_bits(one) == 1024.0);

  // Every point far from a deliberately wrong model is an outlier.
  const auto b = testsupport::blobs(8, 40, 2, 16, 10.0);
  ClusterModel wrong = partition_model(b.frames, b.labels, 2);
  for (double& v : wrong.centroids) v += 1e6;
  const auto all_out = partition_cost(b.frames, wrong);
  CHECK(all_out.outlier_count == 40);
  CHECK(all_out.label_info_bits == 0.0);
  CHECK(meaningfulness_bits(all_out) == all_out.model_bits);
  CHECK(all_out.model_bits == 2048.0);
}

TEST_CASE("adding a nonempty cluster adds exactly 2cm model bits") {
  const auto b = testsupport::blobs(3, 60, 3, 5, 10.0);
  for (int c : {8, 32}) {
    CodingOptions opts;
    opts.precision_bits = c;
    auto labels = b.labels;
    const auto base = partition_cost(b.frames, partition_model(b.frames, labels, 4), opts);
    labels[0] = 3;
    const auto more = partition_cost(b.frames, partition_model(b.frames, labels, 4), opts);
    CHECK(more.model_bits - base.model_bits == 2.0 * c * 5);
  }
}

TEST_CASE("code lengths never exceed the cap and equal it only for outliers") {
  const auto b = testsupport::blobs(12, 200, 4, 8, 3.0);
  auto f = b.frames;
  f.at(5, 2) = 1e5;
  const auto report = partition_cost(f, partition_model(f, b.labels, 4));
  for (std::size_t i = 0; i < f.rows(); ++i) {
    CHECK(report.per_point_code_bits[i] <= 256.0);
    CHECK((report.per_point_code_bits[i] == 256.0) == static_cast<bool>(report.outlier_flags[i]));
  }
}

TEST_CASE("exhaustive partitions bound the selected cost") {
  Rng rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    const std::size_t n = 9;
    const std::size_t m = 1 + static_cast<std::size_t>(trial % 2);
    FrameMatrix f(n, m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < m; ++d) f.at(i, d) = 40.0 * static_cast<double>(i % 3) + rng.normal();
    }
    SelectionOptions opts;
    opts.k_max = 3;
    const auto sel = select_partition(f, 0, opts);
    const auto rows = rows_of(f);
    const auto floor = variance_floor(f);
    long double best = std::numeric_limits<long double>::infinity();
    std::vector<std::size_t> labels(n, 0);
    std::size_t checked = 0;
    for (std::size_t code = 0; code < 19683; ++code) {
      std::size_t v = code;
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = v % 3;
        v /= 3;
      }
      const auto ref = oracle::partition_cost(rows, labels, 3, floor, 32);
      best = std::min(best, ref.total_bits + ref.model_bits);
      if (code % 997 == 0) {
        check_against_oracle(f, labels, 3, 32);
        ++checked;
      }
    }
    CHECK(checked > 10);
    CHECK(static_cast<double>(best) <= sel.report.description_bits() + 1e-9);
    // Three tight groups: the EM optimum is the exhaustive optimum.
    CHECK(sel.report.description_bits() <= static_cast<double>(best) + 1e-6);
  }
}

TEST_CASE("select_partition recovers the generating K") {
  for (std::size_t k_true : {1u, 2u, 3u}) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto b = testsupport::blobs(seed * 7 + k_true, 500, k_true, 16, 10.0);
      const auto sel = select_partition(b.frames, seed);
      if (sel.report.k_selected == k_true) ++hits;
      CHECK(sel.cost_by_k.size() == 8);
      CHECK(sel.report.description_bits() <= sel.cost_by_k[0]);
    }
    CHECK(hits >= 4);
  }
}

TEST_CASE("constant data selects one cluster") {
  FrameMatrix f(100, 4);
  for (double& v : f.values()) v = 2.5;
  const auto sel = select_partition(f, 0);
  CHECK(sel.report.k_selected == 1);
  CHECK(sel.report.label_info_bits == 0.0);
}

TEST_CASE("ties go to the smaller K and the sweep stops at n") {
  const auto f = FrameMatrix::from_rows({{0.0}, {1.0}, {2.0}});
  SelectionOptions opts;
  opts.k_max = 8;
  const auto sel = select_partition(f, 0, opts);
  CHECK(sel.cost_by_k.size() == 3);
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < sel.cost_by_k.size(); ++i) {
    if (sel.cost_by_k[i] < sel.cost_by_k[argmin]) argmin = i;
  }
  CHECK(sel.report.k_selected == argmin + 1);
  CHECK_THROWS_AS(select_partition(FrameMatrix(1, 3), 0), Error);
}

TEST_CASE("selection can rank by the point and label cost alone") {
  const auto b = testsupport::blobs(2, 200, 2, 4, 10.0);
  SelectionOptions opts;
  opts.include_model_cost = false;
  const auto sel = select_partition(b.frames, 0, opts);
  for (double cost : sel.cost_by_k) CHECK(sel.report.total_cost_bits <= cost);
}

TEST_CASE("normalize_score examples") {
  const std::vector<std::size_t> n{1633}, m{16};
  CHECK(normalize_score(0.0, n, 8, 32, m) == 0.0);
  CHECK(normalize_score(13091.0, n, 8, 32, m) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(normalize_score(13091.0 / 2, n, 8, 32, m) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(normalize_score(1e9, n, 8, 32, m) == 100.0);
  const std::vector<std::size_t> n3{1633, 816, 408}, m3{16, 8, 8};
  const double denom = 1633 * 3.0 + 8 * 1024 + 816 * 3.0 + 8 * 512 + 408 * 3.0 + 8 * 512;
  CHECK(normalize_score(denom, n3, 8, 32, m3) == doctest::Approx(100.0).epsilon(1e-12));
}
