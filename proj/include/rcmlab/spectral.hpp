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

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rcmlab/model.hpp"

namespace rcmlab {

// Failure of the dense linear-algebra backend (non-convergence). Kept
// distinct from precondition errors so callers can map it to its own exit
// status.
struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative threshold below which a singular value counts as zero.
inline constexpr double kSingularRelTol = 1e-12;
// Relative threshold for rank decisions in span orthonormalization.
inline constexpr double kRankRelTol = 1e-10;

namespace detail {
inline bool is_real(const DenseComplexMatrix& A) {
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      if (A(i, j).imag() != 0.0) return false;
  return true;
}
}  // namespace detail

// Eigenvalues with multiplicity, unordered. Real inputs take the real Schur
// path, which is substantially faster than the complex solver and exact on
// the same inputs; both delegate to Eigen's QR iteration.
inline std::vector<Complex> eigenvalues(const DenseComplexMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
  if (A.rows() == 0) throw std::invalid_argument("eigenvalues: empty matrix");
  if (!A.allFinite()) throw std::invalid_argument("eigenvalues: non-finite entries");
  Eigen::VectorXcd evs;
  if (detail::is_real(A)) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(A.real(), false);
    if (solver.info() != Eigen::Success) throw BackendError("eigenvalues: QR iteration failed");
    evs = solver.eigenvalues();
  } else {
    Eigen::ComplexEigenSolver<DenseComplexMatrix> solver(A, false);
    if (solver.info() != Eigen::Success) throw BackendError("eigenvalues: QR iteration failed");
    evs = solver.eigenvalues();
  }
  return std::vector<Complex>(evs.data(), evs.data() + evs.size());
}

// Singular values in nonincreasing order; rectangular inputs allowed.
inline std::vector<double> singular_values(const DenseComplexMatrix& A) {
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("singular_values: empty matrix");
  if (!A.allFinite()) throw std::invalid_argument("singular_values: non-finite entries");
  Eigen::BDCSVD<DenseComplexMatrix> svd(A);
  if (svd.info() != Eigen::Success) throw BackendError("singular_values: SVD failed");
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

inline double smallest_singular_value(const DenseComplexMatrix& A, Complex z = Complex(0, 0)) {
  const auto s = singular_values(shift(A, z));
  return s.back();
}

inline double smallest_singular_value(const RowSupportMatrix& M, Complex z = Complex(0, 0)) {
  if (!M.is_square()) throw std::invalid_argument("smallest_singular_value: matrix must be square");
  return smallest_singular_value(to_dense_complex(M), z);
}

// Log potential of the empirical spectral distribution at z:
//   -(1/n) sum_i log s_i(A - zI) = -(1/n) log |det(A - zI)|.
// Returns +infinity when the shifted matrix is exactly singular.
inline double log_potential(const DenseComplexMatrix& A, Complex z) {
  const auto s = singular_values(shift(A, z));
  double acc = 0.0;
  for (double v : s) {
    if (v == 0.0) return std::numeric_limits<double>::infinity();
    acc += std::log(v);
  }
  return -acc / static_cast<double>(s.size());
}

// (1/n) log |det A| via partial-pivot LU; -infinity when singular. Agrees
// with -log_potential but costs O(n^3/3) instead of a full SVD.
inline double log_det_average(const DenseComplexMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("log_det_average: matrix must be square");
  Eigen::PartialPivLU<DenseComplexMatrix> lu(A);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const double a = std::abs(lu.matrixLU()(i, i));
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    acc += std::log(a);
  }
  return acc / static_cast<double>(A.rows());
}

// Orthonormal basis of the span of the given vectors by modified
// Gram-Schmidt with one re-orthogonalization pass. A vector joins the basis
// only if its residual exceeds kRankRelTol times the largest input norm.
inline std::vector<Eigen::VectorXcd> orthonormal_basis(const std::vector<Eigen::VectorXcd>& span) {
  double max_norm = 0.0;
  for (const auto& w : span) max_norm = std::max(max_norm, w.norm());
  const double tol = kRankRelTol * max_norm;
  std::vector<Eigen::VectorXcd> basis;
  for (const auto& w : span) {
    Eigen::VectorXcd v = w;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    const double nv = v.norm();
    if (nv > tol) basis.push_back(v / nv);
  }
  return basis;
}

inline double dist_to_basis(const Eigen::VectorXcd& v, const std::vector<Eigen::VectorXcd>& basis) {
  Eigen::VectorXcd res = v;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) res -= q.dot(res) * q;
  return res.norm();
}

// Euclidean distance from v to the linear span of the given vectors.
inline double dist_to_span(const Eigen::VectorXcd& v, const std::vector<Eigen::VectorXcd>& span) {
  for (const auto& w : span)
    if (w.size() != v.size()) throw std::invalid_argument("dist_to_span: dimension mismatch");
  return dist_to_basis(v, orthonormal_basis(span));
}

// Distances from each row to the span of all other rows.
//
// For square nonsingular A there is a closed form: rows of A and columns of
// A^{-1} are biorthogonal, so dist(R_k, span of others) = 1 / ||A^{-1} e_k||.
// The direct method orthonormalizes the other rows for each k; it is the
// independent reference and the fallback for singular or rectangular input.
enum class LooMethod { kAuto, kDirect, kInverse };

inline std::vector<double> leave_one_out_distances(const DenseComplexMatrix& A,
                                                   LooMethod method = LooMethod::kAuto) {
  const auto m = A.rows();
  std::vector<double> dist(static_cast<std::size_t>(m), 0.0);
  if (method != LooMethod::kDirect && A.rows() == A.cols()) {
    Eigen::PartialPivLU<DenseComplexMatrix> lu(A);
    double min_piv = std::numeric_limits<double>::infinity(), max_piv = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = std::abs(lu.matrixLU()(i, i));
      min_piv = std::min(min_piv, a);
      max_piv = std::max(max_piv, a);
    }
    if (min_piv > 1e-10 * max_piv) {
      const DenseComplexMatrix inv = lu.inverse();
      for (Eigen::Index k = 0; k < m; ++k) dist[static_cast<std::size_t>(k)] = 1.0 / inv.col(k).norm();
      return dist;
    }
    if (method == LooMethod::kInverse)
      throw std::domain_error("leave_one_out_distances: matrix too ill-conditioned for inverse route");
  }
  std::vector<Eigen::VectorXcd> others;
  others.reserve(static_cast<std::size_t>(m) - 1);
  for (Eigen::Index k = 0; k < m; ++k) {
    others.clear();
    for (Eigen::Index i = 0; i < m; ++i)
      if (i != k) others.push_back(A.row(i).transpose());
    dist[static_cast<std::size_t>(k)] = dist_to_span(A.row(k).transpose(), others);
  }
  return dist;
}

struct MomentCheck {
  double lhs = 0.0;  // sum of inverse squared singular values
  double rhs = 0.0;  // sum of inverse squared row-to-complement-span distances
};

// Identity check: for a full-rank k x n matrix (k <= n),
//   sum_i s_i^{-2} = sum_i dist(R_i, span of other rows)^{-2}.
// Both sides are computed by independent routes (SVD vs Gram-Schmidt).
inline MomentCheck negative_second_moment_check(const DenseComplexMatrix& A) {
  if (A.rows() > A.cols())
    throw std::invalid_argument("negative_second_moment_check: needs k <= n");
  const auto s = singular_values(A);
  if (s.back() <= kSingularRelTol * s.front())
    throw std::domain_error("negative_second_moment_check: rank-deficient input");
  MomentCheck out;
  for (double v : s) out.lhs += 1.0 / (v * v);
  for (double v : leave_one_out_distances(A, LooMethod::kDirect)) out.rhs += 1.0 / (v * v);
  return out;
}

struct InterlacingCheck {
  bool holds = true;
  double max_violation = 0.0;
};

// With A' the first n - m rows of A, verifies the singular value interlacing
//   s_{i+m}(A) <= s_i(A') <= s_i(A)   for all i <= n - m,
// at absolute tolerance 1e-9 * s_1(A).
inline InterlacingCheck cauchy_interlacing_check(const DenseComplexMatrix& A, int m) {
  if (A.rows() != A.cols()) throw std::invalid_argument("cauchy_interlacing_check: square input required");
  const int n = static_cast<int>(A.rows());
  if (m < 1 || m >= n) throw std::invalid_argument("cauchy_interlacing_check: requires 1 <= m < n");
  const auto s_full = singular_values(A);
  const auto s_sub = singular_values(A.topRows(n - m));
  const double tol = 1e-9 * s_full.front();
  InterlacingCheck out;
  for (int i = 0; i < n - m; ++i) {
    const double upper_gap = s_sub[static_cast<std::size_t>(i)] - s_full[static_cast<std::size_t>(i)];
    const double lower_gap = s_full[static_cast<std::size_t>(i + m)] - s_sub[static_cast<std::size_t>(i)];
    out.max_violation = std::max({out.max_violation, upper_gap, lower_gap});
  }
  out.holds = out.max_violation <= tol;
  return out;
}

struct SpectralSummary {
  int n = 0;
  std::vector<Complex> eigenvalues;
  std::vector<double> singular_values;  // of A - zI, nonincreasing
  double smin = 0.0;
  double log_potential = 0.0;
};

inline SpectralSummary spectral_summary(const DenseComplexMatrix& A, Complex z = Complex(0, 0)) {
  SpectralSummary s;
  s.n = static_cast<int>(A.rows());
  s.eigenvalues = eigenvalues(A);
  s.singular_values = singular_values(shift(A, z));
  s.smin = s.singular_values.back();
  double acc = 0.0;
  bool singular = false;
  for (double v : s.singular_values) {
    if (v == 0.0) singular = true;
    else acc += std::log(v);
  }
  s.log_potential = singular ? std::numeric_limits<double>::infinity()
                             : -acc / static_cast<double>(s.n);
  return s;
}

}  // namespace rcmlab
