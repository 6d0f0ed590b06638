// Copyright 2026 The rcmlab authors.
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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "rcmlab/graph_stats.hpp"
#include "rcmlab/model.hpp"
#include "rcmlab/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using rcmlab::RowSupportMatrix;
using rcmlab::SplitMix64;

namespace {
RowSupportMatrix tiny_matrix() {
  // 4 x 5, d = 2:
  // rows: {0,1}, {1,2}, {3,4}, {0,4}
  RowSupportMatrix M;
  M.n = 5;
  M.m = 4;
  M.d = 2;
  M.supports = {{0, 1}, {1, 2}, {3, 4}, {0, 4}};
  return M;
}
}  // namespace

TEST_CASE("column sum event compares the max column sum to its band", "[graph]") {
  const auto M = tiny_matrix();
  // Column sums: 2, 2, 1, 1, 2. Threshold (1+tau) m d / n = (1+tau) 8/5.
  auto ev = rcmlab::column_sum_event(M, 0.2);
  CHECK(ev.max_col_sum == 2);
  CHECK_THAT(ev.threshold, WithinRel(1.2 * 8.0 / 5.0, 1e-14));
  CHECK_FALSE(ev.holds);  // 2 > 1.92
  ev = rcmlab::column_sum_event(M, 0.3);
  CHECK(ev.holds);  // 2 <= 2.08
  CHECK_THROWS_AS(rcmlab::column_sum_event(M, 0.0), std::invalid_argument);
}

TEST_CASE("column sum failure bound formula and domain", "[graph]") {
  CHECK_THAT(rcmlab::column_sum_failure_bound(100, 400, 10, 0.5),
             WithinRel(100.0 * std::exp(-400.0 * 10.0 * 0.25 / 300.0), 1e-13));
  CHECK_THROWS_AS(rcmlab::column_sum_failure_bound(10, 10, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rcmlab::column_sum_failure_bound(10, 10, 2, -0.2), std::invalid_argument);
}

TEST_CASE("tall samples nearly equalize column sums", "[graph]") {
  SplitMix64 rng(300);
  const auto M = sample_combinatorial(rcmlab::ModelParams{50, 5000, 5, 0}, rng);
  // tau = 0.5 at m d / n = 500: overwhelming margin at this size.
  CHECK(rcmlab::column_sum_event(M, 0.5).holds);
  CHECK(rcmlab::column_sum_failure_bound(50, 5000, 5, 0.5) < 1e-15);
}

TEST_CASE("centered norm has the single-row lower bound", "[graph]") {
  // A single row: the centered matrix is exactly one centered row, whose norm
  // is the bound itself.
  RowSupportMatrix one;
  one.n = 2;
  one.m = 1;
  one.d = 1;
  one.supports = {{0}};
  CHECK_THAT(rcmlab::restricted_norm(one),
             WithinRel(rcmlab::restricted_norm_lower_bound(2, 1), 1e-12));

  SplitMix64 rng(301);
  for (int rep = 0; rep < 8; ++rep) {
    const auto M = sample_combinatorial(rcmlab::ModelParams{40, 0, 7, 0}, rng);
    REQUIRE(rcmlab::restricted_norm(M) >=
            rcmlab::restricted_norm_lower_bound(40, 7) * (1.0 - 1e-12));
  }
}

TEST_CASE("identical rows push the centered norm to its sqrt(m) scaling", "[graph]") {
  RowSupportMatrix M;
  M.n = 2;
  M.m = 9;
  M.d = 1;
  M.supports.assign(9, {0});
  // Nine copies of the centered row (1/2, -1/2): norm sqrt(9 * 1/2).
  CHECK_THAT(rcmlab::restricted_norm(M), WithinRel(std::sqrt(4.5), 1e-12));
}

TEST_CASE("tall norm bound formula", "[graph]") {
  const double b = rcmlab::tall_norm_bound(350, 100, 30, 2.0, 1.5, 4.0);
  const double expect = 2.0 * 1.5 * std::sqrt(4.0) * std::sqrt(30.0 + 4.0 * std::log(100.0));
  CHECK_THAT(b, WithinRel(expect, 1e-13));
  // min(d, n-d) kicks in beyond d = n/2.
  CHECK_THAT(rcmlab::tall_norm_bound(100, 100, 90, 1.0),
             WithinRel(rcmlab::tall_norm_bound(100, 100, 10, 1.0), 1e-13));
}

TEST_CASE("in and out neighbor sets on a hand matrix", "[graph]") {
  const auto M = tiny_matrix();
  const auto ns = rcmlab::in_out_neighbors(M, {1});
  CHECK(ns.s_in == std::vector<int>{0, 1});   // rows {0,1} and {1,2} meet column 1
  CHECK(ns.s_out == std::vector<int>{1, 2});  // support of row 1
  const auto ns2 = rcmlab::in_out_neighbors(M, {0, 3});
  CHECK(ns2.s_in == std::vector<int>{0, 2, 3});
  CHECK(ns2.s_out == std::vector<int>{0, 1, 4});  // supports of rows 0 and 3
  CHECK_THROWS_AS(rcmlab::in_out_neighbors(M, {5}), std::out_of_range);
  CHECK_THROWS_AS(rcmlab::in_out_neighbors(M, {4}), std::out_of_range);  // no row 4
}

TEST_CASE("singleton neighbor sums are fixed by the row sums", "[graph]") {
  SplitMix64 rng(302);
  const auto M = sample_combinatorial(rcmlab::ModelParams{20, 0, 4, 0}, rng);
  long long in_total = 0;
  for (int j = 0; j < 20; ++j) {
    const auto ns = rcmlab::in_out_neighbors(M, {j});
    REQUIRE(ns.s_out.size() == 4);  // one row's support
    in_total += static_cast<long long>(ns.s_in.size());
  }
  // Every row meets exactly d singleton columns: the total is n d.
  CHECK(in_total == 20 * 4);
}

TEST_CASE("expansion scan visits every subset exhaustively", "[graph]") {
  SplitMix64 rng(303);
  const auto M = sample_combinatorial(rcmlab::ModelParams{12, 0, 3, 0}, rng);
  const auto rep = rcmlab::expansion_check(M, 2, 0.9);
  CHECK(rep.exhaustive);
  CHECK(rep.subsets_checked == 66);  // C(12,2)
  CHECK(rep.worst_J.size() == 2);
  // At eps = 0.9 the in-neighbor window is [0.6, 11.4] and the out floor is
  // 0.6: |S| >= 1 always (any row meets its own columns eventually), so only
  // the upper band can break. Recheck coherence of the flags with a rescan.
  long long violations = 0;
  for (int a = 0; a < 12; ++a)
    for (int b = a + 1; b < 12; ++b) {
      const auto ns = rcmlab::in_out_neighbors(M, {a, b});
      const double s_in = static_cast<double>(ns.s_in.size());
      if (s_in < 0.1 * 2 * 3 || s_in > 1.9 * 2 * 3) ++violations;
    }
  const auto rep2 = rcmlab::expansion_check(M, 2, 0.9);
  CHECK(rep2.holds_in == (violations == 0));
}

TEST_CASE("expansion scan falls back to sampling above the subset limit", "[graph]") {
  SplitMix64 rng(304);
  const auto M = sample_combinatorial(rcmlab::ModelParams{30, 0, 3, 0}, rng);
  SplitMix64 subset_rng(99);
  const auto rep = rcmlab::expansion_check(M, 10, 0.5, &subset_rng, 200, 1000);
  CHECK_FALSE(rep.exhaustive);
  CHECK(rep.subsets_checked == 200);
  // Sampling without an rng is a usage error.
  CHECK_THROWS_AS(rcmlab::expansion_check(M, 10, 0.5, nullptr, 200, 1000),
                  std::invalid_argument);
  CHECK_THROWS_AS(rcmlab::expansion_check(M, 0, 0.5), std::invalid_argument);
}

TEST_CASE("expansion regime marker follows k <= eps n / d", "[graph]") {
  SplitMix64 rng(305);
  const auto M = sample_combinatorial(rcmlab::ModelParams{20, 0, 2, 0}, rng);
  CHECK(rcmlab::expansion_check(M, 2, 0.5).in_regime);        // 2 <= 5
  CHECK_FALSE(rcmlab::expansion_check(M, 6, 0.5).in_regime);  // 6 > 5
}

TEST_CASE("single-overlap row sets on a hand matrix", "[graph]") {
  const auto M = tiny_matrix();
  // J_ell = {0}, J_r = {2}: row {0,1} meets left once and right never;
  // row {1,2} meets right once and left never; row {0,4} meets left once.
  const auto sets = rcmlab::i_ell_i_r(M, {0}, {2});
  CHECK(sets.i_ell == std::vector<int>{0, 3});
  CHECK(sets.i_r == std::vector<int>{1});
  CHECK_THROWS_AS(rcmlab::i_ell_i_r(M, {0, 1}, {1}), std::invalid_argument);
}

TEST_CASE("single-overlap sets match their definition on random samples", "[graph]") {
  SplitMix64 rng(306);
  const auto M = sample_combinatorial(rcmlab::ModelParams{25, 0, 4, 0}, rng);
  const std::vector<int> J_ell = {0, 1, 2, 3, 4};
  const std::vector<int> J_r = {5, 6, 7};
  const auto sets = rcmlab::i_ell_i_r(M, J_ell, J_r);
  for (int i = 0; i < 25; ++i) {
    int ell_hits = 0, r_hits = 0;
    for (int j : M.supports[static_cast<std::size_t>(i)]) {
      if (j <= 4) ++ell_hits;
      else if (j <= 7) ++r_hits;
    }
    const bool in_ell = std::find(sets.i_ell.begin(), sets.i_ell.end(), i) != sets.i_ell.end();
    const bool in_r = std::find(sets.i_r.begin(), sets.i_r.end(), i) != sets.i_r.end();
    REQUIRE(in_ell == (ell_hits == 1 && r_hits == 0));
    REQUIRE(in_r == (r_hits == 1 && ell_hits == 0));
  }
}

TEST_CASE("edge counts and the whole-matrix identity", "[graph]") {
  const auto M = tiny_matrix();
  CHECK(rcmlab::edge_count(M, {0, 1}, {1}) == 2);
  CHECK(rcmlab::edge_count(M, {2}, {0, 1, 2}) == 0);
  std::vector<int> all_rows(4), all_cols(5);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  std::iota(all_cols.begin(), all_cols.end(), 0);
  CHECK(rcmlab::edge_count(M, all_rows, all_cols) == 4 * 2);  // m d
  CHECK_THROWS_AS(rcmlab::edge_count(M, {}, {0}), std::invalid_argument);
}

TEST_CASE("discrepancy defaults and case selection", "[graph]") {
  const auto def = rcmlab::discrepancy_defaults(100, 10);
  CHECK_THAT(def.delta, WithinRel(0.1, 1e-15));
  CHECK_THAT(def.kappa1, WithinRel(std::exp(2.0), 1e-15));
  CHECK_THAT(def.kappa2, WithinRel(10.0, 1e-15));

  SplitMix64 rng(307);
  const auto M = sample_combinatorial(rcmlab::ModelParams{40, 0, 8, 0}, rng);
  std::vector<int> all(40);
  std::iota(all.begin(), all.end(), 0);
  // Whole matrix: edges = n d equals delta |S||T| exactly, ratio 1.
  CHECK(rcmlab::discrepancy_check(M, all, all, 0.2, std::exp(2.0), 10.0) ==
        rcmlab::DiscrepancyCase::kCase1);

  // A single guaranteed edge with near-zero density lands in case 2 while the
  // log-capacity budget allows it, and fails once that budget is removed.
  const int row = 0;
  const int col = M.supports[0][0];
  CHECK(rcmlab::discrepancy_check(M, {row}, {col}, 1e-6, 1.0, 10.0) ==
        rcmlab::DiscrepancyCase::kCase2);
  CHECK(rcmlab::discrepancy_check(M, {row}, {col}, 1e-6, 1.0, 0.1) ==
        rcmlab::DiscrepancyCase::kFail);
}

TEST_CASE("intersection histogram matches the hypergeometric law", "[graph]") {
  const auto M = tiny_matrix();
  const auto hist = rcmlab::intersection_histogram(M, {0, 1});
  CHECK(hist == std::vector<long long>{1, 2, 1});  // row overlaps: 2,1,0,1
  long long total = 0;
  for (long long h : hist) total += h;
  CHECK(total == M.rows());

  // Sampled rows against the exact hypergeometric pmf.
  SplitMix64 rng(308);
  const auto tall = sample_combinatorial(rcmlab::ModelParams{30, 8000, 5, 0}, rng);
  std::vector<int> J(10);
  std::iota(J.begin(), J.end(), 0);
  const auto counts = rcmlab::intersection_histogram(tall, J);
  std::vector<double> observed, expected;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    observed.push_back(static_cast<double>(counts[s]));
    expected.push_back(8000.0 * rcmlab::hypergeometric_pmf(30, 10, 5, static_cast<long long>(s)));
  }
  const double stat = rcmlab::chi_square_statistic(observed, expected);
  CHECK(rcmlab::chi_square_pvalue(stat, static_cast<double>(counts.size() - 1)) > 1e-3);
}

TEST_CASE("transpose intersection counts have a fixed total", "[graph]") {
  SplitMix64 rng(309);
  for (int rep = 0; rep < 10; ++rep) {
    const auto M = sample_combinatorial(rcmlab::ModelParams{35, 0, 6, 0}, rng);
    std::vector<int> J;
    for (int j = 0; j < 35; j += 3) J.push_back(j);
    const auto counts = rcmlab::transpose_intersection_counts(M, J);
    long long total = 0;
    for (long long c : counts) total += c;
    REQUIRE(total == static_cast<long long>(J.size()) * 6);

    // Markov counting bound: at most n/A columns reach A |J| d / n.
    for (double A : {1.5, 2.0, 4.0, 8.0}) {
      const long long heavy = rcmlab::columns_with_heavy_intersection(M, J, A);
      REQUIRE(static_cast<double>(heavy) <= 35.0 / A + 1e-12);
    }
  }
}

TEST_CASE("within-row covariance is exactly -d(n-d)/(n^2(n-1))", "[graph]") {
  using rcmlab::BigRational;
  CHECK(rcmlab::na_covariance(4, 2) == BigRational(-1, 12));
  CHECK(rcmlab::na_covariance(10, 10) == BigRational(0));
  for (long long n = 2; n <= 12; ++n)
    for (long long d = 1; d < n; ++d) {
      const auto cov = rcmlab::na_covariance(n, d);
      REQUIRE(cov < 0);
      REQUIRE(cov == BigRational(-d * (n - d), n * n * (n - 1)));
    }
}

TEST_CASE("empirical pair covariance tracks the exact value", "[graph]") {
  SplitMix64 rng(310);
  const auto M = sample_combinatorial(rcmlab::ModelParams{50, 20000, 5, 0}, rng);
  const auto s = rcmlab::na_covariance_empirical(M);
  const double exact = rcmlab::to_double(rcmlab::na_covariance(50, 5));
  CHECK(std::abs(s.mean - exact) < 5.0 * s.stderr_mean);
  CHECK_THROWS_AS(rcmlab::na_covariance_empirical(M, 3, 3), std::invalid_argument);
}

TEST_CASE("weighted support sums and the Bennett bound", "[graph]") {
  const auto M = tiny_matrix();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(4, 5);
  Q(0, 0) = 1.0;
  Q(0, 1) = 2.0;
  Q(1, 2) = 0.5;
  Q(3, 4) = 3.0;
  CHECK_THAT(rcmlab::f_Q(Q, M), WithinRel(6.5, 1e-15));
  CHECK_THROWS_AS(rcmlab::f_Q(Eigen::MatrixXd::Zero(2, 2), M), std::invalid_argument);

  const auto b = rcmlab::bennett_na_bound(Q, 2, 5, 1.0, 3.0);
  CHECK_THAT(b.mu, WithinRel(0.4 * 6.5, 1e-14));
  CHECK_THAT(b.sigma2, WithinRel(0.4 * (1.0 + 4.0 + 0.25 + 9.0), 1e-14));
  CHECK(b.bound > 0.0);
  CHECK(b.bound < 1.0);

  // t = 0 gives the trivial bound 1; Q out of [0, K] is rejected.
  CHECK(rcmlab::bennett_na_bound(Q, 2, 5, 0.0, 3.0).bound == 1.0);
  CHECK_THROWS_AS(rcmlab::bennett_na_bound(Q, 2, 5, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(rcmlab::bennett_na_bound(-Q, 2, 5, 1.0, 3.0), std::invalid_argument);
}

TEST_CASE("Bennett is never weaker than its Bernstein relaxation", "[graph]") {
  SplitMix64 rng(311);
  for (int rep = 0; rep < 60; ++rep) {
    const int m = 2 + static_cast<int>(rng.below(6));
    const int n = m + static_cast<int>(rng.below(6));
    Eigen::MatrixXd Q(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) Q(i, j) = rng.uniform();
    const double t = 3.0 * rng.uniform() + 1e-3;
    const auto b = rcmlab::bennett_na_bound(Q, 1 + static_cast<long long>(rng.below(n)), n, t, 1.0);
    REQUIRE(b.bound <= b.bernstein * (1.0 + 1e-12));
    // Monotone in t.
    const auto b2 = rcmlab::bennett_na_bound(Q, 1, n, t + 0.5, 1.0);
    const auto b1 = rcmlab::bennett_na_bound(Q, 1, n, t, 1.0);
    REQUIRE(b2.bound <= b1.bound * (1.0 + 1e-12));
  }
}

TEST_CASE("zero weight matrix makes positive deviations impossible", "[graph]") {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(3, 4);
  const auto b = rcmlab::bennett_na_bound(Q, 2, 4, 0.5, 1.0);
  CHECK(b.sigma2 == 0.0);
  CHECK(b.bound == 0.0);
}
