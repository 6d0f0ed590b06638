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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "rcmlab/exact.hpp"
#include "rcmlab/model.hpp"
#include "rcmlab/rng.hpp"
#include "rcmlab/spectral.hpp"
#include "rcmlab/stats.hpp"

namespace rcmlab {

// ---------------------------------------------------------------------------
// Column sums
// ---------------------------------------------------------------------------

struct ColumnSumEvent {
  bool holds = false;
  long long max_col_sum = 0;
  double threshold = 0.0;  // (1 + tau) m d / n
};

// Checks max_j sum_i M_ij <= (1 + tau) m d / n.
inline ColumnSumEvent column_sum_event(const RowSupportMatrix& M, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("column_sum_event: tau must be positive");
  const auto sums = column_sums(M);
  ColumnSumEvent out;
  out.max_col_sum = *std::max_element(sums.begin(), sums.end());
  out.threshold = (1.0 + tau) * static_cast<double>(M.rows()) * static_cast<double>(M.d) /
                  static_cast<double>(M.n);
  out.holds = static_cast<double>(out.max_col_sum) <= out.threshold;
  return out;
}

// Failure-probability bound n exp(-m d tau^2 / (3n)), valid for 0 < tau < 1.
inline double column_sum_failure_bound(long long n, long long m, long long d, double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("column_sum_failure_bound: requires 0 < tau < 1");
  return static_cast<double>(n) *
         std::exp(-static_cast<double>(m) * static_cast<double>(d) * tau * tau /
                  (3.0 * static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// Centered operator norm
// ---------------------------------------------------------------------------

// ||M - EM||: the operator norm of M restricted to the zero-sum sphere, equal
// to the largest singular value of the entrywise-centered matrix.
inline double restricted_norm(const RowSupportMatrix& M) {
  const double mean = static_cast<double>(M.d) / static_cast<double>(M.n);
  Eigen::MatrixXd centered = Eigen::MatrixXd::Constant(M.rows(), M.n, -mean);
  for (Eigen::Index i = 0; i < centered.rows(); ++i)
    for (int j : M.supports[static_cast<std::size_t>(i)]) centered(i, j) += 1.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered);
  if (svd.info() != Eigen::Success) throw BackendError("restricted_norm: SVD did not converge");
  return svd.singularValues()(0);
}

// Deterministic floor sqrt(d (n - d) / n): the Euclidean norm of any single
// centered row.
inline double restricted_norm_lower_bound(long long n, long long d) {
  return std::sqrt(static_cast<double>(d) * static_cast<double>(n - d) / static_cast<double>(n));
}

// Tall-matrix ceiling C beta sqrt(ceil(m/n)) sqrt(min(d, n-d) + gamma log n).
inline double tall_norm_bound(long long m, long long n, long long d, double C, double beta = 1.0,
                              double gamma = 4.0) {
  const long long k = (m + n - 1) / n;
  return C * beta * std::sqrt(static_cast<double>(k)) *
         std::sqrt(static_cast<double>(std::min(d, n - d)) +
                   gamma * std::log(static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// Neighbor sets
// ---------------------------------------------------------------------------

struct NeighborSets {
  std::vector<int> s_in;   // rows whose support meets J
  std::vector<int> s_out;  // union of the supports of the rows indexed by J
};

namespace detail {
inline void require_indices(const std::vector<int>& J, long long limit, const char* what) {
  for (int j : J)
    if (j < 0 || j >= limit) throw std::out_of_range(std::string(what) + ": index out of range");
}
}  // namespace detail

// S(J, M) = {i : Supp(R_i) meets J} and S(J, M^T), which for a row-support
// matrix is the union of the supports of the rows in J. Indices are 0-based.
inline NeighborSets in_out_neighbors(const RowSupportMatrix& M, const std::vector<int>& J) {
  detail::require_indices(J, M.n, "in_out_neighbors");
  std::vector<char> in_J(static_cast<std::size_t>(M.n), 0);
  for (int j : J) in_J[static_cast<std::size_t>(j)] = 1;
  NeighborSets out;
  for (std::size_t i = 0; i < M.supports.size(); ++i)
    for (int j : M.supports[i])
      if (in_J[static_cast<std::size_t>(j)]) {
        out.s_in.push_back(static_cast<int>(i));
        break;
      }
  std::vector<char> seen(static_cast<std::size_t>(M.n), 0);
  for (int j : J) {
    if (j >= M.rows()) throw std::out_of_range("in_out_neighbors: J indexes a missing row");
    for (int col : M.supports[static_cast<std::size_t>(j)]) seen[static_cast<std::size_t>(col)] = 1;
  }
  for (long long c = 0; c < M.n; ++c)
    if (seen[static_cast<std::size_t>(c)]) out.s_out.push_back(static_cast<int>(c));
  return out;
}

// ---------------------------------------------------------------------------
// Expansion scan
// ---------------------------------------------------------------------------

struct ExpansionReport {
  long long k = 0;
  double eps = 0.0;
  bool holds_in = true;   // (1-eps) k d <= |S(J,M)| <= (1+eps) k d for all scanned J
  bool holds_out = true;  // |S(J,M^T)| >= (1-eps) k d for all scanned J
  std::vector<int> worst_J;
  long long worst_value = 0;  // the |S| that came closest to (or past) a bound
  bool exhaustive = true;     // sampled scans certify only found violations
  long long subsets_checked = 0;
  bool in_regime = true;  // k <= eps n / d
};

inline constexpr long long kExhaustiveSubsetLimit = 1000000;

// Scans subsets J of size k against the expansion bracket. All C(n,k) subsets
// are visited when there are at most `exhaustive_limit` of them; otherwise
// `samples` uniform subsets are drawn from rng (required in that case) and
// absence of violations is only an observation, not a certificate.
inline ExpansionReport expansion_check(const RowSupportMatrix& M, long long k, double eps,
                                       SplitMix64* rng = nullptr, long long samples = 10000,
                                       long long exhaustive_limit = kExhaustiveSubsetLimit) {
  if (M.rows() != M.n) throw std::invalid_argument("expansion_check: square matrix required");
  if (k < 1 || k > M.n) throw std::invalid_argument("expansion_check: k out of range");
  ExpansionReport rep;
  rep.k = k;
  rep.eps = eps;
  rep.in_regime =
      static_cast<double>(k) <= eps * static_cast<double>(M.n) / static_cast<double>(M.d);
  const double lo = (1.0 - eps) * static_cast<double>(k) * static_cast<double>(M.d);
  const double hi = (1.0 + eps) * static_cast<double>(k) * static_cast<double>(M.d);

  double worst_margin = std::numeric_limits<double>::infinity();
  std::vector<int> J(static_cast<std::size_t>(k));

  auto visit = [&](const std::vector<int>& subset) {
    const auto ns = in_out_neighbors(M, subset);
    const double s_in = static_cast<double>(ns.s_in.size());
    const double s_out = static_cast<double>(ns.s_out.size());
    if (s_in < lo || s_in > hi) rep.holds_in = false;
    if (s_out < lo) rep.holds_out = false;
    const double margin_in = std::min(s_in - lo, hi - s_in);
    const double margin_out = s_out - lo;
    const double margin = std::min(margin_in, margin_out);
    if (margin < worst_margin) {
      worst_margin = margin;
      rep.worst_J = subset;
      rep.worst_value =
          margin_in <= margin_out ? static_cast<long long>(ns.s_in.size()) : static_cast<long long>(ns.s_out.size());
    }
    ++rep.subsets_checked;
  };

  const double total = std::exp(log_choose(M.n, k));
  if (total <= static_cast<double>(exhaustive_limit) * 1.0000001) {
    std::iota(J.begin(), J.end(), 0);
    while (true) {
      visit(J);
      // next k-combination of [0, n) in lexicographic order
      long long i = k - 1;
      while (i >= 0 && J[static_cast<std::size_t>(i)] == M.n - k + i) --i;
      if (i < 0) break;
      ++J[static_cast<std::size_t>(i)];
      for (long long t = i + 1; t < k; ++t)
        J[static_cast<std::size_t>(t)] = J[static_cast<std::size_t>(t - 1)] + 1;
    }
  } else {
    if (rng == nullptr)
      throw std::invalid_argument("expansion_check: sampled mode needs an rng (too many subsets)");
    rep.exhaustive = false;
    for (long long s = 0; s < samples; ++s) visit(sample_support(M.n, k, *rng));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Single-overlap row sets
// ---------------------------------------------------------------------------

struct SingleOverlapSets {
  std::vector<int> i_ell;  // exactly one support index in J_ell, none in J_r
  std::vector<int> i_r;    // exactly one support index in J_r, none in J_ell
};

inline SingleOverlapSets i_ell_i_r(const RowSupportMatrix& A, const std::vector<int>& J_ell,
                                   const std::vector<int>& J_r) {
  detail::require_indices(J_ell, A.n, "i_ell_i_r");
  detail::require_indices(J_r, A.n, "i_ell_i_r");
  std::vector<char> mark(static_cast<std::size_t>(A.n), 0);  // 1 = left, 2 = right
  for (int j : J_ell) mark[static_cast<std::size_t>(j)] = 1;
  for (int j : J_r) {
    if (mark[static_cast<std::size_t>(j)] == 1)
      throw std::invalid_argument("i_ell_i_r: J_ell and J_r must be disjoint");
    mark[static_cast<std::size_t>(j)] = 2;
  }
  SingleOverlapSets out;
  for (std::size_t i = 0; i < A.supports.size(); ++i) {
    int hits_ell = 0, hits_r = 0;
    for (int j : A.supports[i]) {
      if (mark[static_cast<std::size_t>(j)] == 1) ++hits_ell;
      else if (mark[static_cast<std::size_t>(j)] == 2) ++hits_r;
    }
    if (hits_ell == 1 && hits_r == 0) out.i_ell.push_back(static_cast<int>(i));
    if (hits_r == 1 && hits_ell == 0) out.i_r.push_back(static_cast<int>(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Discrepancy property
// ---------------------------------------------------------------------------

inline long long edge_count(const RowSupportMatrix& M, const std::vector<int>& S,
                            const std::vector<int>& T) {
  if (S.empty() || T.empty()) throw std::invalid_argument("edge_count: S and T must be nonempty");
  detail::require_indices(S, M.rows(), "edge_count (rows)");
  detail::require_indices(T, M.n, "edge_count (cols)");
  std::vector<char> in_T(static_cast<std::size_t>(M.n), 0);
  for (int j : T) in_T[static_cast<std::size_t>(j)] = 1;
  long long edges = 0;
  for (int i : S)
    for (int j : M.supports[static_cast<std::size_t>(i)])
      edges += in_T[static_cast<std::size_t>(j)];
  return edges;
}

enum class DiscrepancyCase { kCase1, kCase2, kFail };

struct DiscrepancyDefaults {
  double delta;
  double kappa1;
  double kappa2;
};

// delta = d/n, kappa1 = e^2, kappa2 = 2 (4 + beta) with beta = 1.
inline DiscrepancyDefaults discrepancy_defaults(long long n, long long d, double beta = 1.0) {
  return {static_cast<double>(d) / static_cast<double>(n), std::exp(2.0), 2.0 * (4.0 + beta)};
}

// Block S x T satisfies the discrepancy property when either
//   (1) edges / (delta |S| |T|) <= kappa1, or
//   (2) edges log(edges / (delta |S| |T|)) <= kappa2 (|S| v |T|) log(e n / (|S| v |T|)).
inline DiscrepancyCase discrepancy_check(const RowSupportMatrix& M, const std::vector<int>& S,
                                         const std::vector<int>& T, double delta, double kappa1,
                                         double kappa2) {
  const auto edges = static_cast<double>(edge_count(M, S, T));
  const double expected = delta * static_cast<double>(S.size()) * static_cast<double>(T.size());
  if (expected <= 0.0) throw std::invalid_argument("discrepancy_check: delta must be positive");
  if (edges <= kappa1 * expected) return DiscrepancyCase::kCase1;
  const double big = static_cast<double>(std::max(S.size(), T.size()));
  const double rhs =
      kappa2 * big * std::log(std::exp(1.0) * static_cast<double>(M.n) / big);
  if (edges * std::log(edges / expected) <= rhs) return DiscrepancyCase::kCase2;
  return DiscrepancyCase::kFail;
}

// ---------------------------------------------------------------------------
// Support intersections
// ---------------------------------------------------------------------------

// histogram[s] = #{rows i : |Supp(R_i) meet J| = s}, s = 0..d. The matching
// population law is hypergeometric_pmf(n, |J|, d, s).
inline std::vector<long long> intersection_histogram(const RowSupportMatrix& M,
                                                     const std::vector<int>& J) {
  detail::require_indices(J, M.n, "intersection_histogram");
  std::vector<char> in_J(static_cast<std::size_t>(M.n), 0);
  for (int j : J) in_J[static_cast<std::size_t>(j)] = 1;
  std::vector<long long> hist(static_cast<std::size_t>(M.d) + 1, 0);
  for (const auto& support : M.supports) {
    int hits = 0;
    for (int j : support) hits += in_J[static_cast<std::size_t>(j)];
    ++hist[static_cast<std::size_t>(hits)];
  }
  return hist;
}

// Per-column counts #{j in J : M_ji = 1} (the intersections of the transpose's
// rows with J). Their total is exactly |J| d regardless of the sample.
inline std::vector<long long> transpose_intersection_counts(const RowSupportMatrix& M,
                                                            const std::vector<int>& J) {
  detail::require_indices(J, M.rows(), "transpose_intersection_counts");
  std::vector<long long> counts(static_cast<std::size_t>(M.n), 0);
  for (int j : J)
    for (int col : M.supports[static_cast<std::size_t>(j)]) ++counts[static_cast<std::size_t>(col)];
  return counts;
}

// #{columns i : count_i >= A |J| d / n} <= n / A for every A > 0, by Markov
// counting on the fixed total |J| d; exposed for direct checking.
inline long long columns_with_heavy_intersection(const RowSupportMatrix& M,
                                                 const std::vector<int>& J, double A) {
  if (!(A > 0.0)) throw std::invalid_argument("columns_with_heavy_intersection: A must be positive");
  const auto counts = transpose_intersection_counts(M, J);
  const double cut = A * static_cast<double>(J.size()) * static_cast<double>(M.d) /
                     static_cast<double>(M.n);
  long long heavy = 0;
  for (long long c : counts)
    if (static_cast<double>(c) >= cut) ++heavy;
  return heavy;
}

// ---------------------------------------------------------------------------
// Negative-association covariance
// ---------------------------------------------------------------------------

// Exact Cov(M_ij, M_ik) for j != k within one row:
//   d(d-1)/(n(n-1)) - d^2/n^2 = -d(n-d)/(n^2(n-1)).
inline BigRational na_covariance(long long n, long long d) {
  if (d < 1 || n < 2 || d > n) throw std::invalid_argument("na_covariance: need 1 <= d <= n, n >= 2");
  const BigRational joint = BigRational(BigInt(d) * (d - 1), BigInt(n) * (n - 1));
  const BigRational mean2 = BigRational(BigInt(d) * d, BigInt(n) * n);
  return joint - mean2;
}

// Sample covariance of (M_ij - d/n)(M_ik - d/n) across the rows of one (tall)
// sample; the row law is exchangeable in the columns, so one fixed pair is an
// unbiased probe of every pair.
inline Summary na_covariance_empirical(const RowSupportMatrix& M, int col_j = 0, int col_k = 1) {
  if (col_j == col_k || col_j < 0 || col_k < 0 || col_j >= M.n || col_k >= M.n)
    throw std::invalid_argument("na_covariance_empirical: need two distinct valid columns");
  const double mean = static_cast<double>(M.d) / static_cast<double>(M.n);
  std::vector<double> products;
  products.reserve(M.supports.size());
  for (const auto& support : M.supports) {
    const bool has_j = std::binary_search(support.begin(), support.end(), col_j);
    const bool has_k = std::binary_search(support.begin(), support.end(), col_k);
    products.push_back(((has_j ? 1.0 : 0.0) - mean) * ((has_k ? 1.0 : 0.0) - mean));
  }
  return summarize(products);
}

// ---------------------------------------------------------------------------
// Bennett bound for weighted sums
// ---------------------------------------------------------------------------

// f_Q(M) = sum_ij Q_ij M_ij over the support.
inline double f_Q(const Eigen::MatrixXd& Q, const RowSupportMatrix& M) {
  if (Q.rows() != M.rows() || Q.cols() != M.n)
    throw std::invalid_argument("f_Q: shape mismatch");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < Q.rows(); ++i)
    for (int j : M.supports[static_cast<std::size_t>(i)]) sum += Q(i, j);
  return sum;
}

struct BennettBound {
  double mu = 0.0;      // (d/n) sum Q_ij
  double sigma2 = 0.0;  // (d/n) sum Q_ij^2
  double bound = 1.0;   // exp(-(sigma^2/K^2) h(K t / sigma^2))
  double bernstein = 1.0;  // weaker closed form exp(-3t^2/(6 sigma^2 + 2 K t))
};

// Two-sided tail bound for f_Q(M):
//   max(P(f - mu >= t), P(f - mu <= -t)) <= exp(-(sigma^2/K^2) h(K t/sigma^2)),
// h(u) = (1+u) log(1+u) - u.
inline BennettBound bennett_na_bound(const Eigen::MatrixXd& Q, long long d, long long n, double t,
                                     double K) {
  if (!(K > 0.0)) throw std::invalid_argument("bennett_na_bound: K must be positive");
  if (t < 0.0) throw std::invalid_argument("bennett_na_bound: t must be nonnegative");
  if ((Q.array() < 0.0).any() || (Q.array() > K).any())
    throw std::invalid_argument("bennett_na_bound: Q entries must lie in [0, K]");
  BennettBound out;
  const double ratio = static_cast<double>(d) / static_cast<double>(n);
  out.mu = ratio * Q.sum();
  out.sigma2 = ratio * Q.array().square().sum();
  if (t == 0.0) return out;  // h(0) = 0 -> both bounds 1
  if (out.sigma2 == 0.0) {
    out.bound = 0.0;  // f_Q is deterministic (Q = 0), any positive deviation impossible
    out.bernstein = 0.0;
    return out;
  }
  const double u = K * t / out.sigma2;
  const double h = (1.0 + u) * std::log1p(u) - u;
  out.bound = std::exp(-(out.sigma2 / (K * K)) * h);
  out.bernstein = std::exp(-3.0 * t * t / (6.0 * out.sigma2 + 2.0 * K * t));
  return out;
}

}  // namespace rcmlab
