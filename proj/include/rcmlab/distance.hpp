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
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rcmlab/exact.hpp"
#include "rcmlab/model.hpp"
#include "rcmlab/rng.hpp"
#include "rcmlab/spectral.hpp"
#include "rcmlab/stats.hpp"
#include "rcmlab/vector_classes.hpp"

namespace rcmlab {

// ---------------------------------------------------------------------------
// The D(p) scale
// ---------------------------------------------------------------------------

// D(p) = sqrt(p (1-p) (n-k) + d_uprime^2), the exact root-mean-square of the
// distance from a Bernoulli(p) perturbation to a k-dimensional subspace.
inline double D_p(double p, long long n, long long k, double d_uprime) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("D_p: p must lie in (0, 1)");
  if (k >= n || k < 0) throw std::invalid_argument("D_p: need 0 <= k < n");
  if (d_uprime < 0.0) throw std::invalid_argument("D_p: d_uprime must be nonnegative");
  return std::sqrt(p * (1.0 - p) * static_cast<double>(n - k) + d_uprime * d_uprime);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct DistanceExperiment {
  long long n = 0;
  long long k = 0;
  double p = 0.0;
  Eigen::VectorXcd u;      // deterministic shift
  Eigen::MatrixXcd basis;  // n x k, orthonormal columns spanning V
  long long trials = 0;
  bool in_regime = true;  // p (1-p) (n-k) >= 1
};

// Validates orthonormality of the frame (within 1e-10 entrywise on Q^H Q) and
// packages the experiment.
inline DistanceExperiment make_distance_experiment(const Eigen::MatrixXcd& basis, double p,
                                                   const Eigen::VectorXcd& u, long long trials) {
  if (basis.rows() <= basis.cols() || basis.cols() < 1)
    throw std::invalid_argument("make_distance_experiment: need an n x k frame with 1 <= k < n");
  if (u.size() != basis.rows())
    throw std::invalid_argument("make_distance_experiment: shift length mismatch");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("make_distance_experiment: p in (0, 1)");
  if (trials < 1) throw std::invalid_argument("make_distance_experiment: trials >= 1");
  const Eigen::MatrixXcd gram = basis.adjoint() * basis;
  const double defect =
      (gram - Eigen::MatrixXcd::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10)
    throw std::invalid_argument("make_distance_experiment: frame not orthonormal within 1e-10");
  DistanceExperiment exp;
  exp.n = basis.rows();
  exp.k = basis.cols();
  exp.p = p;
  exp.u = u;
  exp.basis = basis;
  exp.trials = trials;
  exp.in_regime = p * (1.0 - p) * static_cast<double>(exp.n - exp.k) >= 1.0;
  return exp;
}

// Random orthonormal frame from a Gaussian draw; with include_ones the first
// column is the normalized all-ones vector and the rest completes it, so the
// constant direction lies inside the subspace.
inline Eigen::MatrixXcd random_orthonormal_frame(long long n, long long k, SplitMix64& rng,
                                                 bool include_ones = false) {
  if (k < 1 || k >= n) throw std::invalid_argument("random_orthonormal_frame: need 1 <= k < n");
  std::vector<Eigen::VectorXcd> span;
  span.reserve(static_cast<std::size_t>(k));
  if (include_ones)
    span.push_back(Eigen::VectorXcd::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0)));
  while (static_cast<long long>(span.size()) < k) {
    Eigen::VectorXcd g(n);
    for (long long i = 0; i < n; ++i) g(i) = Complex(rng.normal(), 0.0);
    span.push_back(g);
  }
  const auto basis = orthonormal_basis(span);
  if (static_cast<long long>(basis.size()) != k)
    throw std::runtime_error("random_orthonormal_frame: degenerate Gaussian draw");
  Eigen::MatrixXcd Q(n, k);
  for (long long j = 0; j < k; ++j) Q.col(j) = basis[static_cast<std::size_t>(j)];
  return Q;
}

// Frame spanning the first k rows of a sampled matrix (the subspace family the
// distance statements are applied to). Throws if the rows are dependent.
inline Eigen::MatrixXcd row_span_frame(const RowSupportMatrix& M, long long k) {
  if (k < 1 || k > M.rows() || k >= M.n)
    throw std::invalid_argument("row_span_frame: need 1 <= k <= m and k < n");
  std::vector<Eigen::VectorXcd> span;
  span.reserve(static_cast<std::size_t>(k));
  for (long long i = 0; i < k; ++i) {
    Eigen::VectorXcd row = Eigen::VectorXcd::Zero(M.n);
    for (int j : M.supports[static_cast<std::size_t>(i)]) row(j) = Complex(1.0, 0.0);
    span.push_back(row);
  }
  const auto basis = orthonormal_basis(span);
  if (static_cast<long long>(basis.size()) != k)
    throw std::invalid_argument("row_span_frame: rows are linearly dependent");
  Eigen::MatrixXcd Q(M.n, k);
  for (long long j = 0; j < k; ++j) Q.col(j) = basis[static_cast<std::size_t>(j)];
  return Q;
}

// dist(u + p 1, V): the deterministic offset term entering D(p).
inline double d_uprime(const DistanceExperiment& exp) {
  const Eigen::VectorXcd uprime =
      exp.u + Eigen::VectorXcd::Constant(exp.n, Complex(exp.p, 0.0));
  const Eigen::VectorXcd residual = uprime - exp.basis * (exp.basis.adjoint() * uprime);
  return residual.norm();
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

struct DistanceModel {
  enum class Kind { kBernoulli, kFixedSum };
  Kind kind = Kind::kBernoulli;
  long long d = 0;

  static DistanceModel bernoulli() { return {Kind::kBernoulli, 0}; }
  static DistanceModel fixed_sum(long long d) { return {Kind::kFixedSum, d}; }
};

struct DistanceTrial {
  double r = 0.0;
  double r_squared = 0.0;
  // r^2 = ||P x||^2 + 2 Re<x, P u'> + ||P u'||^2 with x the centered draw,
  // u' = u + c 1 the recentered shift, P the projector onto the orthogonal
  // complement of V. Stored for the per-trial identity check.
  double px_norm2 = 0.0;
  double cross = 0.0;
  double pu_norm2 = 0.0;
};

// One sampled r = dist(delta + u, V). The centering constant is p for the
// Bernoulli model and d/n for the fixed-sum model.
inline DistanceTrial distance_trial(const DistanceExperiment& exp, SplitMix64& rng,
                                    DistanceModel model = DistanceModel::bernoulli()) {
  const long long n = exp.n;
  Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(n);
  double center = exp.p;
  if (model.kind == DistanceModel::Kind::kBernoulli) {
    for (long long i = 0; i < n; ++i)
      if (rng.uniform() < exp.p) delta(i) = Complex(1.0, 0.0);
  } else {
    if (model.d < 1 || model.d > n) throw std::invalid_argument("distance_trial: bad fixed-sum d");
    for (int j : sample_support(n, model.d, rng)) delta(j) = Complex(1.0, 0.0);
    center = static_cast<double>(model.d) / static_cast<double>(n);
  }
  const Eigen::VectorXcd ones_c = Eigen::VectorXcd::Constant(n, Complex(center, 0.0));
  const Eigen::VectorXcd x = delta - ones_c;
  const Eigen::VectorXcd uprime = exp.u + ones_c;

  auto project_out = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    return v - exp.basis * (exp.basis.adjoint() * v);
  };
  const Eigen::VectorXcd px = project_out(x);
  const Eigen::VectorXcd pu = project_out(uprime);

  DistanceTrial t;
  t.px_norm2 = px.squaredNorm();
  t.pu_norm2 = pu.squaredNorm();
  t.cross = 2.0 * (x.adjoint() * pu)(0).real();
  const Eigen::VectorXcd residual = project_out(delta + exp.u);
  t.r = residual.norm();
  t.r_squared = residual.squaredNorm();
  return t;
}

// Empirical tail curve: for each t in t_grid, the fraction of trials with
// |r - rbar| >= t, rbar being the sample mean standing in for E(p).
struct DistanceTailProfile {
  std::vector<double> t_grid;
  std::vector<double> frequency;
  double r_mean = 0.0;
};

inline DistanceTailProfile distance_tail_profile(const DistanceExperiment& exp, SplitMix64& rng,
                                                 DistanceModel model,
                                                 const std::vector<double>& t_grid) {
  if (exp.trials < 100) throw std::invalid_argument("distance_tail_profile: need >= 100 trials");
  std::vector<double> rs;
  rs.reserve(static_cast<std::size_t>(exp.trials));
  for (long long i = 0; i < exp.trials; ++i) rs.push_back(distance_trial(exp, rng, model).r);
  DistanceTailProfile out;
  out.t_grid = t_grid;
  const double rbar = summarize(rs).mean;
  out.r_mean = rbar;
  for (double t : t_grid) {
    long long hits = 0;
    for (double r : rs)
      if (std::abs(r - rbar) >= t) ++hits;
    out.frequency.push_back(static_cast<double>(hits) / static_cast<double>(rs.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixed-sum conditioning ratio
// ---------------------------------------------------------------------------

struct ConditioningRatio {
  double exact = 0.0;           // P(Binomial(n, d/n) = d), evaluated exactly
  double stirling_lower = 0.0;  // (1/4) sqrt(1/(pi d))
};

inline ConditioningRatio conditioning_ratio(long long n, long long d) {
  if (d < 1 || 2 * d > n) throw std::invalid_argument("conditioning_ratio: need 1 <= d <= n/2");
  const BigRational exact = BigRational(big_binomial(n, d)) * rational_pow(BigRational(d, n), d) *
                            rational_pow(BigRational(n - d, n), n - d);
  ConditioningRatio out;
  out.exact = to_double(exact);
  out.stirling_lower = 0.25 * std::sqrt(1.0 / (3.14159265358979323846 * static_cast<double>(d)));
  if (out.exact < out.stirling_lower)
    throw std::logic_error("conditioning_ratio: exact value fell below its proven floor");
  return out;
}

// ---------------------------------------------------------------------------
// Invertibility via distances
// ---------------------------------------------------------------------------

struct InvertibilityDistanceReport {
  std::vector<double> distances;  // dist(R_k, span of the other rows)
  double s_min = 0.0;
  double min_distance = 0.0;
  bool relation_holds = false;   // s_min <= min_k dist_k (within jitter)
  bool smin_event = false;       // s_min <= eps rho / sqrt(n)
  long long small_distances = 0; // #{k : dist_k <= eps}
};

// Per-instance ingredients of the union-bound reduction from the smallest
// singular value to row distances. The Monte Carlo comparison of
// P(s_min <= eps rho / sqrt(n)) against (1/(delta n)) sum_k P(dist_k <= eps)
// aggregates these reports across a batch.
inline InvertibilityDistanceReport invertibility_via_distance_check(const DenseComplexMatrix& A,
                                                                    double delta, double rho,
                                                                    double eps) {
  if (A.rows() != A.cols()) throw std::invalid_argument("invertibility_via_distance_check: square input");
  if (!(delta > 0.0 && rho > 0.0 && eps >= 0.0))
    throw std::invalid_argument("invertibility_via_distance_check: bad parameters");
  InvertibilityDistanceReport rep;
  rep.distances = leave_one_out_distances(A);
  rep.min_distance = *std::min_element(rep.distances.begin(), rep.distances.end());
  const auto sv = singular_values(A);
  rep.s_min = sv.back();
  rep.relation_holds = rep.s_min <= rep.min_distance + 1e-9 * sv.front();
  rep.smin_event = rep.s_min <= eps * rho / std::sqrt(static_cast<double>(A.rows()));
  for (double dist : rep.distances)
    if (dist <= eps) ++rep.small_distances;
  return rep;
}

}  // namespace rcmlab
