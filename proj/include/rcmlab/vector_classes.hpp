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
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rcmlab/model.hpp"

namespace rcmlab {

// ---------------------------------------------------------------------------
// Rearrangement
// ---------------------------------------------------------------------------

// Nonincreasing rearrangement of moduli: xstar[k] = |x[sigma[k]]| with
// xstar nonincreasing; ties are broken by the smallest original index.
struct VectorProfile {
  Eigen::VectorXcd x;
  std::vector<double> xstar;
  std::vector<int> sigma;

  // 1-based order statistic x*_k as used throughout the jump definitions.
  double star(long long k) const {
    if (k < 1 || k > static_cast<long long>(xstar.size()))
      throw std::out_of_range("VectorProfile::star: index outside [1, n]");
    return xstar[static_cast<std::size_t>(k - 1)];
  }
};

inline VectorProfile rearrangement(const Eigen::VectorXcd& x) {
  if (x.size() == 0) throw std::invalid_argument("rearrangement: empty vector");
  VectorProfile p;
  p.x = x;
  p.sigma.resize(static_cast<std::size_t>(x.size()));
  std::iota(p.sigma.begin(), p.sigma.end(), 0);
  std::stable_sort(p.sigma.begin(), p.sigma.end(),
                   [&](int a, int b) { return std::abs(x(a)) > std::abs(x(b)); });
  p.xstar.reserve(p.sigma.size());
  for (int idx : p.sigma) p.xstar.push_back(std::abs(x(idx)));
  return p;
}

// ---------------------------------------------------------------------------
// Parameter cascade
// ---------------------------------------------------------------------------

// Default scale constants (respect a3 <= a2/30 <= a1/900) and the relaxed
// preset for exploration at small n, where the default cutoffs n2, n3 all
// collapse to zero. The relaxed values violate the constraint chain and are
// only accepted with relaxed = true.
inline constexpr double kDefaultA1 = 0.009;
inline constexpr double kDefaultA2 = 0.0003;
inline constexpr double kDefaultA3 = 0.00001;
inline constexpr double kRelaxedA1 = 0.1;
inline constexpr double kRelaxedA2 = 0.01;
inline constexpr double kRelaxedA3 = 0.001;

struct NormBounds {
  double BT2 = 0.0;
  double BT3 = 0.0;
  double BT = 0.0;
};

// Class-wise l2 norm bound constants. For n1 > 1:
//   B(T2) = (6d)^{r+1} d^{1/4} / (26 (log n)^{1/4}),
//   B(T3) = (6d)^{r+1} d / (26 (log n)^{1/4}),
//   B_T   = (6d)^{r+2} / (36 (log n)^{1/4});
// for n1 = 1: B(T2) = sqrt(n), B(T3) = B_T = sqrt(2n).
inline NormBounds norm_bounds(long long n, long long d, long long n1, int r) {
  NormBounds b;
  const double dn = static_cast<double>(n);
  if (n1 > 1) {
    const double logq = std::pow(std::log(dn), 0.25);
    const double dd = static_cast<double>(d);
    const double six_r1 = std::pow(6.0 * dd, r + 1);
    b.BT2 = six_r1 * std::pow(dd, 0.25) / (26.0 * logq);
    b.BT3 = six_r1 * dd / (26.0 * logq);
    b.BT = six_r1 * 6.0 * dd / (36.0 * logq);
  } else {
    b.BT2 = std::sqrt(dn);
    b.BT3 = std::sqrt(2.0 * dn);
    b.BT = b.BT3;
  }
  return b;
}

struct ClassParams {
  long long n = 0;
  long long d = 0;
  double a1 = kDefaultA1, a2 = kDefaultA2, a3 = kDefaultA3;
  double delta = kDefaultA3;  // Cons(a3, rho) is the combination the theory uses
  double rho = 0.0;
  double eps0 = 0.0;
  long long ell0 = 0;
  long long n1 = 0, n2 = 0, n3 = 0;
  int r = -1;  // defined only when n1 > 1
  double BT2 = 0.0, BT3 = 0.0, BT = 0.0;
  bool relaxed = false;

  bool has_r() const { return n1 > 1; }
};

namespace detail {
inline bool leq_with_slack(double x, double y) { return x <= y * (1.0 + 1e-12) + 1e-300; }
}  // namespace detail

// The parameter cascade for dimension n and row sum d:
//   eps0 = sqrt(48 log n / d),        ell0 = floor(1 / (100 eps0)),
//   n1 = ceil(a1 eps0 n / d),         n2 = floor(a2 n / d^{3/4}),
//   n3 = floor(a3 n),                 ell0^r < n1 <= ell0^{r+1} when n1 > 1.
// rho = 0 requests the default: the intersection of the two admissible
// ranges sqrt(n)/(B_T d^{3/4}) and sqrt(n)/(5 B_T).
inline ClassParams class_params(long long n, long long d, double a1 = kDefaultA1,
                                double a2 = kDefaultA2, double a3 = kDefaultA3,
                                double delta = -1.0, double rho = 0.0, bool relaxed = false) {
  if (n < 3 || d < 2) throw std::invalid_argument("class_params: requires n >= 3 and d >= 2");
  if (!relaxed && 2 * d > n)
    throw std::invalid_argument("class_params: d > n/2 requires the relaxed flag");
  if (!(a1 > 0 && a2 > 0 && a3 > 0)) throw std::invalid_argument("class_params: scale constants must be positive");
  if (!relaxed && !(detail::leq_with_slack(a3, a2 / 30.0) && detail::leq_with_slack(a2 / 30.0, a1 / 900.0)))
    throw std::invalid_argument("class_params: constraint chain a3 <= a2/30 <= a1/900 violated (pass relaxed to override)");

  ClassParams p;
  p.n = n;
  p.d = d;
  p.a1 = a1;
  p.a2 = a2;
  p.a3 = a3;
  p.relaxed = relaxed;
  const double dn = static_cast<double>(n), dd = static_cast<double>(d);
  p.eps0 = std::sqrt(48.0 * std::log(dn) / dd);
  p.ell0 = static_cast<long long>(std::floor(1.0 / (100.0 * p.eps0)));
  p.n1 = static_cast<long long>(std::ceil(a1 * p.eps0 * dn / dd));
  p.n2 = static_cast<long long>(std::floor(a2 * dn / std::pow(dd, 0.75)));
  p.n3 = static_cast<long long>(std::floor(a3 * dn));
  if (p.n1 > 1) {
    if (p.ell0 < 2)
      throw std::domain_error("class_params: n1 > 1 requires ell0 >= 2 (d too small relative to log n)");
    int r = 0;
    long long power = p.ell0;  // ell0^{r+1}
    while (power < p.n1) {
      power *= p.ell0;
      ++r;
    }
    p.r = r;
  }
  const auto b = norm_bounds(p.n, p.d, p.n1, p.r);
  p.BT2 = b.BT2;
  p.BT3 = b.BT3;
  p.BT = b.BT;
  p.delta = delta >= 0.0 ? delta : a3;
  p.rho = rho > 0.0 ? rho
                    : std::sqrt(dn) / (p.BT * std::max(std::pow(dd, 0.75), 5.0));
  return p;
}

// ---------------------------------------------------------------------------
// Almost-constant vectors
// ---------------------------------------------------------------------------

struct ConsDecision {
  bool member = false;
  std::optional<Complex> witness;  // set when member
};

namespace detail {
inline ConsDecision cons_from_candidates(const Eigen::VectorXcd& x, double delta, double rho,
                                         bool fast) {
  const auto n = x.size();
  if (n == 0 || x.norm() == 0.0) throw std::invalid_argument("is_almost_constant: zero vector");
  if (!(delta > 0.0 && rho > 0.0)) throw std::invalid_argument("is_almost_constant: delta, rho must be positive");
  const double radius = rho * x.norm() / std::sqrt(static_cast<double>(n));
  const double need = (1.0 - delta) * static_cast<double>(n);

  std::vector<Complex> candidates(x.data(), x.data() + n);
  candidates.push_back(Complex(0.0, 0.0));

  std::vector<int> by_re(static_cast<std::size_t>(n));
  std::iota(by_re.begin(), by_re.end(), 0);
  if (fast)
    std::sort(by_re.begin(), by_re.end(),
              [&](int a, int b) { return x(a).real() < x(b).real(); });

  for (const Complex& lambda : candidates) {
    long long count = 0;
    if (fast) {
      // Only coordinates whose real part lies in the axis-aligned box around
      // lambda can be inside the disk; binary-search that window, then apply
      // the exact disk test inside it.
      const auto lo = std::lower_bound(by_re.begin(), by_re.end(), lambda.real() - radius,
                                       [&](int idx, double v) { return x(idx).real() < v; });
      const auto hi = std::upper_bound(by_re.begin(), by_re.end(), lambda.real() + radius,
                                       [&](double v, int idx) { return v < x(idx).real(); });
      for (auto it = lo; it != hi; ++it)
        if (std::abs(x(*it) - lambda) <= radius) ++count;
    } else {
      for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(x(i) - lambda) <= radius) ++count;
    }
    if (static_cast<double>(count) > need) return {true, lambda};
  }
  return {false, std::nullopt};
}
}  // namespace detail

// Decides almost-constant membership by searching for a witness center among
// the coordinates themselves plus zero. TRUE is exact membership (strictly
// more than (1-delta)n coordinates inside the closed disk of radius
// rho ||x|| / sqrt(n) around the witness). FALSE certifies non-membership
// only at radius rho/2: if some center lambda worked at rho/2, any hit
// coordinate would work as a center at rho, and the search tried them all.
inline ConsDecision is_almost_constant(const Eigen::VectorXcd& x, double delta, double rho) {
  return detail::cons_from_candidates(x, delta, rho, true);
}

// Quadratic reference path without the sorted-window pruning; intended for
// cross-checking at n <= 500.
inline ConsDecision is_almost_constant_reference(const Eigen::VectorXcd& x, double delta, double rho) {
  return detail::cons_from_candidates(x, delta, rho, false);
}

// ---------------------------------------------------------------------------
// Steep classification
// ---------------------------------------------------------------------------

struct SteepLabel {
  enum class Kind { kT1, kT2, kT3, kNone };
  Kind kind = Kind::kNone;
  int index = -1;  // the i of T1_i, meaningful only when kind == kT1

  bool is_steep() const { return kind != Kind::kNone; }
};

namespace detail {
inline void require_classifiable(const ClassParams& p) {
  if (p.n1 < 1 || p.n2 < 1 || p.n3 < 1 || p.n3 > p.n || p.n2 > p.n || p.n1 > p.n)
    throw std::invalid_argument(
        "classify_steep: cutoffs n1, n2, n3 must lie in [1, n] (scale constants too small for this n, d)");
}
}  // namespace detail

// First matching class in the order T1_0, ..., T1_r, T2, T3, none:
//   T1_i: x*_{ell0^i} > 6d x*_{min(ell0^{i+1}, n1)}   (only when n1 > 1),
//   T2:   x*_{n1} > d^{3/4} x*_{n2},
//   T3:   x*_{n2} > 4 x*_{n3}.
// The "first match wins" order implements the definitions' exclusions.
inline SteepLabel classify_steep(const VectorProfile& x, const ClassParams& p) {
  detail::require_classifiable(p);
  if (static_cast<long long>(x.xstar.size()) != p.n)
    throw std::invalid_argument("classify_steep: vector length != n");
  const double six_d = 6.0 * static_cast<double>(p.d);
  if (p.has_r()) {
    long long power = 1;  // ell0^i
    for (int i = 0; i <= p.r; ++i) {
      const long long next = std::min(power * p.ell0, p.n1);
      if (x.star(power) > six_d * x.star(next)) return {SteepLabel::Kind::kT1, i};
      power *= p.ell0;
    }
  }
  if (x.star(p.n1) > std::pow(static_cast<double>(p.d), 0.75) * x.star(p.n2))
    return {SteepLabel::Kind::kT2, -1};
  if (x.star(p.n2) > 4.0 * x.star(p.n3)) return {SteepLabel::Kind::kT3, -1};
  return {SteepLabel::Kind::kNone, -1};
}

struct NormBoundCheck {
  double lhs = 0.0;  // ||x||_2
  double rhs = 0.0;  // class bound
  bool holds = false;
};

// Verifies the class-wise norm bound for a labeled vector:
//   y in T2:  ||y|| <= B(T2) y*_{n1};    z in T3: ||z|| <= B(T3) z*_{n2};
//   w not steep: ||w|| <= B_T w*_{n3};
//   x in T1_j:  ||x|| <= max(d^{1/4} (6d)^j / (15 (log n)^{1/4}), sqrt(2n)) x*_{ell0^j}.
inline NormBoundCheck class_norm_bound_check(const VectorProfile& x, const SteepLabel& label,
                                             const ClassParams& p) {
  detail::require_classifiable(p);
  NormBoundCheck out;
  out.lhs = x.x.norm();
  const double dd = static_cast<double>(p.d);
  switch (label.kind) {
    case SteepLabel::Kind::kT1: {
      if (!p.has_r() || label.index < 0 || label.index > p.r)
        throw std::invalid_argument("class_norm_bound_check: T1 label incompatible with params");
      long long power = 1;
      for (int i = 0; i < label.index; ++i) power *= p.ell0;
      const double coeff = std::max(
          std::pow(dd, 0.25) * std::pow(6.0 * dd, label.index) / (15.0 * std::pow(std::log(static_cast<double>(p.n)), 0.25)),
          std::sqrt(2.0 * static_cast<double>(p.n)));
      out.rhs = coeff * x.star(power);
      break;
    }
    case SteepLabel::Kind::kT2:
      out.rhs = p.BT2 * x.star(p.n1);
      break;
    case SteepLabel::Kind::kT3:
      out.rhs = p.BT3 * x.star(p.n2);
      break;
    case SteepLabel::Kind::kNone:
      out.rhs = p.BT * x.star(p.n3);
      break;
  }
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

// ---------------------------------------------------------------------------
// Triple norm
// ---------------------------------------------------------------------------

// ||P_{e-perp} x||^2 + d ||P_e x||^2 with e = (1,...,1)/sqrt(n): the plain
// l2 norm with the component along the constant direction reweighted by d.
inline double triple_norm(const Eigen::VectorXcd& x, long long d) {
  if (x.size() == 0) throw std::invalid_argument("triple_norm: empty vector");
  const double n = static_cast<double>(x.size());
  const Complex along = x.sum() / std::sqrt(n);  // <e, x>
  const double along2 = std::norm(along);
  const double perp2 = std::max(x.squaredNorm() - along2, 0.0);
  return std::sqrt(perp2 + static_cast<double>(d) * along2);
}

// ---------------------------------------------------------------------------
// Rate functions
// ---------------------------------------------------------------------------

struct RateConstants {
  double C2 = 1.0;  // inside alpha's logarithm
  double c1 = 1.0;  // theta prefactor in the n1 = 1 branch
};

struct RateFunctions {
  double theta = 0.0;
  std::optional<double> omega;  // only defined when n1 > 1 (T1 nonempty)
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_lower_bound = 0.0;
};

// The invertibility rate functions:
//   theta = min( sqrt(d)/(4 sqrt(n)), 5 ell0^{r/2} (d log n)^{1/4} / (6d)^r,
//                54 (log n)^{1/4} sqrt(n) / (6d)^{r+2} )          [n1 > 1]
//         = c1 (log n / d)^{1/4}                                  [n1 = 1]
//   omega = min( sqrt(d)/(4 sqrt(n)), 5 ell0^{r/2} (d log n)^{1/4} / (6d)^r )
//   alpha = 2 log(6d) / log(d / (C2 log n)),
//   alpha_lower_bound = d^{3 alpha - 5.5} / (n^{2 alpha} (log n)^{alpha - 1/2}),
//   beta  = exponent with n^{-beta} = alpha_lower_bound.
inline RateFunctions rate_functions(const ClassParams& p, RateConstants consts = {}) {
  RateFunctions out;
  const double n = static_cast<double>(p.n), d = static_cast<double>(p.d);
  const double logn = std::log(n);
  const double ratio = d / (consts.C2 * logn);
  if (ratio <= 1.0)
    throw std::domain_error("rate_functions: alpha needs d > C2 log n");
  out.alpha = 2.0 * std::log(6.0 * d) / std::log(ratio);
  out.alpha_lower_bound = std::pow(d, 3.0 * out.alpha - 5.5) /
                          (std::pow(n, 2.0 * out.alpha) * std::pow(logn, out.alpha - 0.5));
  out.beta = -std::log(out.alpha_lower_bound) / logn;

  const double term1 = std::sqrt(d) / (4.0 * std::sqrt(n));
  if (p.has_r()) {
    const double term2 = 5.0 * std::pow(static_cast<double>(p.ell0), 0.5 * p.r) *
                         std::pow(d * logn, 0.25) / std::pow(6.0 * d, p.r);
    const double term3 = 54.0 * std::pow(logn, 0.25) * std::sqrt(n) / std::pow(6.0 * d, p.r + 2);
    out.omega = std::min(term1, term2);
    out.theta = std::min({term1, term2, term3});
  } else {
    out.theta = consts.c1 * std::pow(logn / d, 0.25);
  }
  return out;
}

}  // namespace rcmlab
