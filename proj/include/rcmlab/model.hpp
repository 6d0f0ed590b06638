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
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rcmlab/rng.hpp"

namespace rcmlab {

using DenseComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

struct ModelParams {
  int n = 0;            // number of columns
  int m = 0;            // number of rows; 0 means "use n"
  int d = 0;            // ones per row
  std::uint64_t seed = 0;

  int rows() const { return m > 0 ? m : n; }
};

// A 0/1 matrix stored as per-row sorted support lists, each of size exactly d.
// Row supports are kept 0-based in memory; the text format is 1-based.
struct RowSupportMatrix {
  int n = 0;
  int m = 0;
  int d = 0;
  std::vector<std::vector<int>> supports;

  int rows() const { return m; }
  bool is_square() const { return n == m; }
};

inline void validate(const RowSupportMatrix& M) {
  if (M.n < 1 || M.m < 1 || M.d < 0 || M.d > M.n)
    throw std::invalid_argument("RowSupportMatrix: bad dimensions");
  if (static_cast<int>(M.supports.size()) != M.m)
    throw std::invalid_argument("RowSupportMatrix: row count mismatch");
  for (const auto& row : M.supports) {
    if (static_cast<int>(row.size()) != M.d)
      throw std::invalid_argument("RowSupportMatrix: row support size != d");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] < 0 || row[j] >= M.n)
        throw std::invalid_argument("RowSupportMatrix: index out of range");
      if (j > 0 && row[j] <= row[j - 1])
        throw std::invalid_argument("RowSupportMatrix: support not strictly increasing");
    }
  }
}

// Uniform d-subset of [0, n) by a partial Fisher-Yates shuffle: exactly d
// swaps into the front of an index array, then sort the prefix. Exact
// uniformity over all C(n, d) subsets, O(n) setup and O(d log d) per row.
inline std::vector<int> sample_support(int n, int d, SplitMix64& rng, std::vector<int>& scratch) {
  scratch.resize(static_cast<std::size_t>(n));
  std::iota(scratch.begin(), scratch.end(), 0);
  for (int i = 0; i < d; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
  }
  std::vector<int> support(scratch.begin(), scratch.begin() + d);
  std::sort(support.begin(), support.end());
  return support;
}

inline std::vector<int> sample_support(int n, int d, SplitMix64& rng) {
  std::vector<int> scratch;
  return sample_support(n, d, rng, scratch);
}

// Each row is an independent uniform d-subset of the n columns.
inline RowSupportMatrix sample_combinatorial(const ModelParams& params, SplitMix64& rng) {
  if (params.d < 1 || params.d > params.n)
    throw std::invalid_argument("sample_combinatorial: requires 1 <= d <= n");
  if (params.rows() < 1) throw std::invalid_argument("sample_combinatorial: requires m >= 1");
  RowSupportMatrix M;
  M.n = params.n;
  M.m = params.rows();
  M.d = params.d;
  M.supports.reserve(static_cast<std::size_t>(M.m));
  std::vector<int> scratch;
  for (int i = 0; i < M.m; ++i) M.supports.push_back(sample_support(M.n, M.d, rng, scratch));
  return M;
}

inline RowSupportMatrix sample_combinatorial(const ModelParams& params) {
  SplitMix64 rng(params.seed);
  return sample_combinatorial(params, rng);
}

// Square matrix with i.i.d. Bernoulli(p) entries (stored complex-valued so it
// can be shifted and compared against the fixed-row-sum model directly).
inline DenseComplexMatrix sample_bernoulli(int n, double p, SplitMix64& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_bernoulli: p outside [0,1]");
  if (n < 1) throw std::invalid_argument("sample_bernoulli: n must be positive");
  DenseComplexMatrix B = DenseComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rng.uniform() < p) B(i, j) = Complex(1.0, 0.0);
  return B;
}

inline Eigen::MatrixXd to_dense(const RowSupportMatrix& M) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M.m, M.n);
  for (int i = 0; i < M.m; ++i)
    for (int j : M.supports[static_cast<std::size_t>(i)]) A(i, j) = 1.0;
  return A;
}

inline DenseComplexMatrix to_dense_complex(const RowSupportMatrix& M) {
  return to_dense(M).cast<Complex>();
}

// The scale that brings the ensemble's spectral bulk to the unit disk:
// divide by sqrt(d (1 - d/n)).
inline double normalization_scale(int n, int d) {
  if (d <= 0 || d >= n) throw std::invalid_argument("normalization_scale: requires 0 < d < n");
  const double p = static_cast<double>(d) / static_cast<double>(n);
  return 1.0 / std::sqrt(static_cast<double>(d) * (1.0 - p));
}

inline DenseComplexMatrix normalize(const RowSupportMatrix& M) {
  return to_dense_complex(M) * normalization_scale(M.n, M.d);
}

inline DenseComplexMatrix shift(const DenseComplexMatrix& A, Complex z) {
  if (A.rows() != A.cols()) throw std::invalid_argument("shift: matrix must be square");
  DenseComplexMatrix S = A;
  S.diagonal().array() -= z;
  return S;
}

// Entrywise mean of the ensemble: every entry equals d/n.
inline DenseComplexMatrix expectation_matrix(int n, int m, int d) {
  if (n < 1 || m < 1 || d < 0 || d > n)
    throw std::invalid_argument("expectation_matrix: bad dimensions");
  const double p = static_cast<double>(d) / static_cast<double>(n);
  return DenseComplexMatrix::Constant(m, n, Complex(p, 0.0));
}

// Complement within the all-ones matrix: supports are complemented per row,
// giving an element of the (n - d)-per-row ensemble. d = 0 output is legal
// here (complement of the all-ones matrix) even though the sampler rejects it.
inline RowSupportMatrix complement(const RowSupportMatrix& M) {
  RowSupportMatrix C;
  C.n = M.n;
  C.m = M.m;
  C.d = M.n - M.d;
  C.supports.reserve(static_cast<std::size_t>(M.m));
  for (const auto& row : M.supports) {
    std::vector<int> comp;
    comp.reserve(static_cast<std::size_t>(C.d));
    std::size_t k = 0;
    for (int j = 0; j < M.n; ++j) {
      if (k < row.size() && row[k] == j) {
        ++k;
      } else {
        comp.push_back(j);
      }
    }
    C.supports.push_back(std::move(comp));
  }
  return C;
}

// Column sums of the support representation (row sums are d by construction).
inline std::vector<int> column_sums(const RowSupportMatrix& M) {
  std::vector<int> sums(static_cast<std::size_t>(M.n), 0);
  for (const auto& row : M.supports)
    for (int j : row) ++sums[static_cast<std::size_t>(j)];
  return sums;
}

inline int count_zero_columns(const RowSupportMatrix& M) {
  const auto sums = column_sums(M);
  return static_cast<int>(std::count(sums.begin(), sums.end(), 0));
}

}  // namespace rcmlab
