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
#include <stdexcept>
#include <vector>

#include "rcmlab/model.hpp"
#include "rcmlab/spectral.hpp"
#include "rcmlab/stats.hpp"

namespace rcmlab {

// Rotation-invariant reference laws for spectra on the disk.
//  - circular: uniform on the unit disk, radial CDF r^2.
//  - oriented_km: density d^2 (d-1) / (pi (d^2 - |z|^2)^2) on |z| <= sqrt(d),
//    the fixed-d candidate limit; radial CDF (d-1) r^2 / (d^2 - r^2).
struct ReferenceMeasure {
  enum class Kind { kCircular, kOrientedKM };
  Kind kind = Kind::kCircular;
  int d = 0;  // used by oriented_km only

  static ReferenceMeasure circular() { return {Kind::kCircular, 0}; }
  static ReferenceMeasure oriented_km(int d) {
    if (d < 2) throw std::invalid_argument("oriented_km: requires d >= 2");
    return {Kind::kOrientedKM, d};
  }

  double support_radius() const {
    return kind == Kind::kCircular ? 1.0 : std::sqrt(static_cast<double>(d));
  }

  // Density of the modulus at radius r (2 pi r times the planar density).
  double radial_density(double r) const {
    if (r < 0.0) throw std::domain_error("radial_density: negative radius");
    if (r >= support_radius()) return 0.0;
    if (kind == Kind::kCircular) return 2.0 * r;
    const double dd = static_cast<double>(d);
    const double denom = dd * dd - r * r;
    return 2.0 * dd * dd * (dd - 1.0) * r / (denom * denom);
  }
};

inline double radial_cdf(const ReferenceMeasure& measure, double r) {
  if (r < 0.0) throw std::domain_error("radial_cdf: negative radius");
  if (measure.kind == ReferenceMeasure::Kind::kCircular) return std::min(r * r, 1.0);
  const double dd = static_cast<double>(measure.d);
  if (r * r >= dd) return 1.0;
  return (dd - 1.0) * r * r / (dd * dd - r * r);
}

// KS distance between the empirical law of |lambda_i| and the reference's
// radial CDF, with the exact sup taken over jump points and left limits.
inline double ks_radial(const std::vector<Complex>& eigenvalues, const ReferenceMeasure& measure) {
  if (eigenvalues.empty()) throw std::invalid_argument("ks_radial: empty spectrum");
  std::vector<double> moduli;
  moduli.reserve(eigenvalues.size());
  for (const auto& ev : eigenvalues) moduli.push_back(std::abs(ev));
  return ks_statistic(moduli, [&](double r) { return radial_cdf(measure, r); });
}

// KS distance of eigenvalue arguments against the uniform law on [-pi, pi),
// restricted to eigenvalues off the origin (|lambda| > 1e-9).
inline double angular_ks(const std::vector<Complex>& eigenvalues) {
  std::vector<double> args;
  for (const auto& ev : eigenvalues)
    if (std::abs(ev) > 1e-9) args.push_back(std::arg(ev));
  if (args.empty()) throw std::invalid_argument("angular_ks: all eigenvalues at the origin");
  constexpr double kPi = 3.141592653589793238462643383279;
  return ks_statistic(args, [](double a) { return (a + kPi) / (2.0 * kPi); });
}

// Fraction of eigenvalues inside the closed disk of radius 1 + tol.
inline double disk_coverage(const std::vector<Complex>& eigenvalues, double tol) {
  if (tol < 0.0) throw std::domain_error("disk_coverage: negative tolerance");
  if (eigenvalues.empty()) return 1.0;
  std::size_t inside = 0;
  for (const auto& ev : eigenvalues)
    if (std::abs(ev) <= 1.0 + tol) ++inside;
  return static_cast<double>(inside) / static_cast<double>(eigenvalues.size());
}

// Log-determinant gap between a fixed-row-sum sample and an independent
// Bernoulli(d/n) sample, both normalized by sqrt(d (1 - d/n)) and shifted
// by z:
//   (1/n) log |det(Mbar - zI)| - (1/n) log |det(Bbar - zI)|.
// Infinite when either factor is singular. The two empirical spectral
// distributions share a limit exactly when this gap vanishes for a.e. z
// (given the Hilbert-Schmidt norm control both models satisfy).
inline double replacement_gap(const RowSupportMatrix& M, const DenseComplexMatrix& B, Complex z) {
  if (!M.is_square() || B.rows() != B.cols() || B.rows() != M.n)
    throw std::invalid_argument("replacement_gap: dimension mismatch");
  const double scale = normalization_scale(M.n, M.d);
  const double lhs = log_det_average(shift(to_dense_complex(M) * scale, z));
  const double rhs = log_det_average(shift(B * scale, z));
  return lhs - rhs;
}

}  // namespace rcmlab
