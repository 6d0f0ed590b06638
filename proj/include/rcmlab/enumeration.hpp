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

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rcmlab/exact.hpp"
#include "rcmlab/model.hpp"

namespace rcmlab {

// ---------------------------------------------------------------------------
// Enumeration of the whole ensemble at tiny (n, d)
// ---------------------------------------------------------------------------

struct EnumerationBudget {
  long long max_states = 10000000;  // refuse when C(n,d)^n exceeds this
};

namespace detail {
inline std::vector<std::vector<int>> combinations_lex(long long n, long long d) {
  if (n < 1 || d < 1 || d > n)
    throw std::invalid_argument("combinations_lex: need 1 <= d <= n");
  std::vector<std::vector<int>> combos;
  std::vector<int> c(static_cast<std::size_t>(d));
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    combos.push_back(c);
    long long i = d - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - d + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (long long t = i + 1; t < d; ++t)
      c[static_cast<std::size_t>(t)] = c[static_cast<std::size_t>(t - 1)] + 1;
  }
  return combos;
}
}  // namespace detail

// Walks every member of the n x n fixed-row-sum ensemble exactly once, in
// lexicographic order of the concatenated row supports (row 0 most
// significant). Rows are odometer digits over the lex-ordered d-subsets.
class MatrixEnumerator {
 public:
  MatrixEnumerator(long long n, long long d, EnumerationBudget budget = {})
      : n_(n), d_(d), combos_(detail::combinations_lex(n, d)) {
    if (n > 62) throw std::invalid_argument("MatrixEnumerator: n too large for bitmask columns");
    total_ = big_pow(BigInt(combos_.size()), n);
    if (total_ > BigInt(budget.max_states))
      throw std::invalid_argument("MatrixEnumerator: C(n,d)^n exceeds the state budget");
    for (std::size_t rank = 0; rank < combos_.size(); ++rank) rank_of_[combos_[rank]] = rank;
  }

  const BigInt& total_states() const { return total_; }
  long long total_states_ll() const { return static_cast<long long>(total_); }
  long long row_choices() const { return static_cast<long long>(combos_.size()); }

  // f receives (const RowSupportMatrix&, const std::vector<int>& row_ranks).
  template <class F>
  void for_each(F&& f) const {
    RowSupportMatrix M;
    M.n = n_;
    M.m = n_;
    M.d = d_;
    std::vector<int> digits(static_cast<std::size_t>(n_), 0);
    M.supports.assign(static_cast<std::size_t>(n_), combos_[0]);
    const long long base = static_cast<long long>(combos_.size());
    while (true) {
      f(static_cast<const RowSupportMatrix&>(M), static_cast<const std::vector<int>&>(digits));
      long long row = n_ - 1;  // least significant digit: the last row
      while (row >= 0 && digits[static_cast<std::size_t>(row)] == base - 1) {
        digits[static_cast<std::size_t>(row)] = 0;
        M.supports[static_cast<std::size_t>(row)] = combos_[0];
        --row;
      }
      if (row < 0) break;
      const int next = ++digits[static_cast<std::size_t>(row)];
      M.supports[static_cast<std::size_t>(row)] = combos_[static_cast<std::size_t>(next)];
    }
  }

  // Lexicographic rank of a sampled member inside this enumeration; the cell
  // index for sampler-vs-oracle goodness of fit.
  long long matrix_index(const RowSupportMatrix& M) const {
    if (M.n != n_ || M.d != d_ || M.rows() != n_)
      throw std::invalid_argument("matrix_index: shape mismatch");
    long long index = 0;
    const long long base = static_cast<long long>(combos_.size());
    for (const auto& support : M.supports) {
      const auto it = rank_of_.find(support);
      if (it == rank_of_.end()) throw std::invalid_argument("matrix_index: invalid support");
      index = index * base + static_cast<long long>(it->second);
    }
    return index;
  }

 private:
  long long n_, d_;
  std::vector<std::vector<int>> combos_;
  std::map<std::vector<int>, std::size_t> rank_of_;
  BigInt total_;
};

// ---------------------------------------------------------------------------
// Exact determinants
// ---------------------------------------------------------------------------

// Fraction-free Bareiss elimination over big integers; exact for any integer
// matrix.
inline BigInt bareiss_determinant(std::vector<std::vector<BigInt>> a) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("bareiss_determinant: square input required");
  if (n == 0) return BigInt(1);
  BigInt prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t pivot = k + 1;
      while (pivot < n && a[pivot][k] == 0) ++pivot;
      if (pivot == n) return BigInt(0);
      std::swap(a[k], a[pivot]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign > 0 ? a[n - 1][n - 1] : -a[n - 1][n - 1];
}

inline BigInt exact_determinant(const RowSupportMatrix& M) {
  if (M.rows() != M.n) throw std::invalid_argument("exact_determinant: square input required");
  std::vector<std::vector<BigInt>> a(static_cast<std::size_t>(M.n),
                                     std::vector<BigInt>(static_cast<std::size_t>(M.n), BigInt(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int j : M.supports[i]) a[i][static_cast<std::size_t>(j)] = 1;
  return bareiss_determinant(std::move(a));
}

// ---------------------------------------------------------------------------
// Exact probabilities and moments
// ---------------------------------------------------------------------------

inline ExactFraction exact_singularity_probability(long long n, long long d,
                                                   EnumerationBudget budget = {}) {
  MatrixEnumerator enumerator(n, d, budget);
  BigInt singular(0);
  enumerator.for_each([&](const RowSupportMatrix& M, const std::vector<int>&) {
    if (exact_determinant(M) == 0) ++singular;
  });
  return ExactFraction{singular, enumerator.total_states()};
}

struct ZeroColumnMoments {
  BigRational ex;   // E X, X = number of zero columns
  BigRational ex2;  // E X^2
};

namespace detail {
inline std::uint64_t column_hit_mask(const RowSupportMatrix& M) {
  std::uint64_t mask = 0;
  for (const auto& support : M.supports)
    for (int j : support) mask |= (std::uint64_t{1} << j);
  return mask;
}
}  // namespace detail

inline ZeroColumnMoments exact_zero_column_moments(long long n, long long d,
                                                   EnumerationBudget budget = {}) {
  MatrixEnumerator enumerator(n, d, budget);
  BigInt sum_x(0), sum_x2(0);
  enumerator.for_each([&](const RowSupportMatrix& M, const std::vector<int>&) {
    const long long zeros = n - std::popcount(detail::column_hit_mask(M));
    sum_x += zeros;
    sum_x2 += zeros * zeros;
  });
  return ZeroColumnMoments{BigRational(sum_x, enumerator.total_states()),
                           BigRational(sum_x2, enumerator.total_states())};
}

// q = E X = n ((n-d)/n)^n.
inline BigRational zero_column_mean_formula(long long n, long long d) {
  return BigRational(n) * rational_pow(BigRational(n - d, n), n);
}

// P(two fixed columns are both zero) = ((n-d)(n-d-1)/(n(n-1)))^n.
inline BigRational zero_column_pair_probability(long long n, long long d) {
  if (n < 2) throw std::invalid_argument("zero_column_pair_probability: n >= 2");
  return rational_pow(BigRational(BigInt(n - d) * (n - d - 1), BigInt(n) * (n - 1)), n);
}

// E X^2 <= q + ((n-1)/n) q^2 with q the exact mean.
inline BigRational zero_column_second_moment_bound(long long n, long long d) {
  const BigRational q = zero_column_mean_formula(n, d);
  return q + BigRational(n - 1, n) * q * q;
}

struct EventProbabilities {
  ExactFraction zero_col;
  ExactFraction dup_rows;
  ExactFraction dup_cols;
  ExactFraction singular;
};

// Exact probabilities of a zero column, duplicate rows, duplicate columns,
// and singularity. Verifies along the way that each of the first three events
// forces a zero determinant.
inline EventProbabilities exact_event_probabilities(long long n, long long d,
                                                    EnumerationBudget budget = {}) {
  MatrixEnumerator enumerator(n, d, budget);
  BigInt zero_col(0), dup_rows(0), dup_cols(0), singular(0);
  std::vector<std::uint64_t> col_masks(static_cast<std::size_t>(n));
  enumerator.for_each([&](const RowSupportMatrix& M, const std::vector<int>& digits) {
    const bool has_zero_col = std::popcount(detail::column_hit_mask(M)) < n;

    bool has_dup_rows = false;
    for (std::size_t i = 0; i < digits.size() && !has_dup_rows; ++i)
      for (std::size_t j = i + 1; j < digits.size(); ++j)
        if (digits[i] == digits[j]) {
          has_dup_rows = true;
          break;
        }

    std::fill(col_masks.begin(), col_masks.end(), 0);
    for (std::size_t i = 0; i < M.supports.size(); ++i)
      for (int j : M.supports[i]) col_masks[static_cast<std::size_t>(j)] |= (std::uint64_t{1} << i);
    bool has_dup_cols = false;
    for (std::size_t a = 0; a < col_masks.size() && !has_dup_cols; ++a)
      for (std::size_t b = a + 1; b < col_masks.size(); ++b)
        if (col_masks[a] == col_masks[b]) {
          has_dup_cols = true;
          break;
        }

    const bool is_singular = exact_determinant(M) == 0;
    if ((has_zero_col || has_dup_rows || has_dup_cols) && !is_singular)
      throw std::logic_error("exact_event_probabilities: degenerate matrix with nonzero determinant");

    if (has_zero_col) ++zero_col;
    if (has_dup_rows) ++dup_rows;
    if (has_dup_cols) ++dup_cols;
    if (is_singular) ++singular;
  });
  const BigInt& total = enumerator.total_states();
  return EventProbabilities{ExactFraction{zero_col, total}, ExactFraction{dup_rows, total},
                            ExactFraction{dup_cols, total}, ExactFraction{singular, total}};
}

// ---------------------------------------------------------------------------
// Expansion distribution
// ---------------------------------------------------------------------------

// q = 1 - C(n-k, d)/C(n, d): the probability that one row's support meets a
// fixed k-set.
inline BigRational expansion_q(long long n, long long d, long long k) {
  if (k < 0 || k > n) throw std::invalid_argument("expansion_q: k out of range");
  if (k > n - d) return BigRational(1);
  return BigRational(1) - BigRational(big_binomial(n - k, d), big_binomial(n, d));
}

// |S(J, M)| is Binomial(n, q) for |J| = k; returns its exact pmf over 0..n.
inline std::vector<BigRational> expansion_pmf(long long n, long long d, long long k) {
  const BigRational q = expansion_q(n, d, k);
  const BigRational one_minus = BigRational(1) - q;
  std::vector<BigRational> pmf;
  pmf.reserve(static_cast<std::size_t>(n) + 1);
  for (long long s = 0; s <= n; ++s)
    pmf.push_back(BigRational(big_binomial(n, s)) * rational_pow(q, s) *
                  rational_pow(one_minus, n - s));
  return pmf;
}

}  // namespace rcmlab
