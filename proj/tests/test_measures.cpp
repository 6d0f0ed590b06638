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
#include <complex>
#include <vector>

#include "rcmlab/model.hpp"
#include "rcmlab/reference_measures.hpp"
#include "rcmlab/rng.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using rcmlab::Complex;
using rcmlab::ReferenceMeasure;

namespace {
// Composite Simpson integration of the radial density on [0, r].
double density_integral(const ReferenceMeasure& m, double r, int panels = 20000) {
  const double h = r / (2.0 * panels);
  double acc = m.radial_density(0.0) + m.radial_density(r - 1e-15);
  for (int i = 1; i < 2 * panels; ++i)
    acc += m.radial_density(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}
}  // namespace

TEST_CASE("circular law radial CDF is r^2 capped at one", "[measures]") {
  const auto c = ReferenceMeasure::circular();
  CHECK(c.support_radius() == 1.0);
  CHECK_THAT(rcmlab::radial_cdf(c, 0.5), WithinRel(0.25, 1e-15));
  CHECK(rcmlab::radial_cdf(c, 2.0) == 1.0);
  CHECK(rcmlab::radial_cdf(c, 0.0) == 0.0);
  CHECK_THROWS_AS(rcmlab::radial_cdf(c, -0.1), std::domain_error);
}

TEST_CASE("fixed-d radial CDF hits its endpoints and d >= 2 is enforced", "[measures]") {
  const auto km = ReferenceMeasure::oriented_km(4);
  CHECK_THAT(km.support_radius(), WithinRel(2.0, 1e-15));
  CHECK(rcmlab::radial_cdf(km, 0.0) == 0.0);
  CHECK_THAT(rcmlab::radial_cdf(km, 2.0), WithinAbs(1.0, 1e-15));
  // (d-1) r^2 / (d^2 - r^2) at r=1, d=4: 3/15 = 0.2.
  CHECK_THAT(rcmlab::radial_cdf(km, 1.0), WithinRel(0.2, 1e-15));
  CHECK_THROWS_AS(ReferenceMeasure::oriented_km(1), std::invalid_argument);
}

TEST_CASE("radial density integrates to the radial CDF", "[measures]") {
  for (const auto& m : {ReferenceMeasure::circular(), ReferenceMeasure::oriented_km(3),
                        ReferenceMeasure::oriented_km(32)}) {
    for (double frac : {0.25, 0.5, 0.9, 1.0}) {
      const double r = frac * m.support_radius();
      REQUIRE_THAT(density_integral(m, r), WithinAbs(rcmlab::radial_cdf(m, r), 1e-8));
    }
  }
}

TEST_CASE("ks_radial vanishes on quantile-perfect samples", "[measures]") {
  const auto c = ReferenceMeasure::circular();
  std::vector<Complex> eigs;
  const int n = 200;
  for (int i = 1; i <= n; ++i) {
    const double u = (2.0 * i - 1.0) / (2.0 * n);
    const double r = std::sqrt(u);  // inverse of the circular radial CDF
    const double a = 2.0 * 3.14159265358979323846 * i / n;
    eigs.push_back(Complex(r * std::cos(a), r * std::sin(a)));
  }
  CHECK(rcmlab::ks_radial(eigs, c) <= 1.0 / (2.0 * n) + 1e-12);
  // The same points are far from the d=32 law.
  CHECK(rcmlab::ks_radial(eigs, ReferenceMeasure::oriented_km(32)) > 0.2);
}

TEST_CASE("angular KS ignores the origin and sees uniform angles", "[measures]") {
  std::vector<Complex> eigs;
  const int n = 128;
  for (int i = 0; i < n; ++i) {
    const double a = -3.14159265358979323846 + (2.0 * i + 1.0) * 3.14159265358979323846 / n;
    eigs.push_back(Complex(0.7 * std::cos(a), 0.7 * std::sin(a)));
  }
  eigs.push_back(Complex(0.0, 0.0));  // filtered out
  eigs.push_back(Complex(1e-12, 0.0));
  CHECK(rcmlab::angular_ks(eigs) < 0.01);
  CHECK_THROWS_AS(rcmlab::angular_ks({Complex(0.0, 0.0)}), std::invalid_argument);
}

TEST_CASE("disk coverage counts eigenvalues inside 1 + tol", "[measures]") {
  const std::vector<Complex> eigs = {Complex(0.5, 0.0), Complex(0.0, 1.04), Complex(1.5, 0.0)};
  CHECK_THAT(rcmlab::disk_coverage(eigs, 0.0), WithinRel(1.0 / 3.0, 1e-15));
  CHECK_THAT(rcmlab::disk_coverage(eigs, 0.05), WithinRel(2.0 / 3.0, 1e-15));
  CHECK_THAT(rcmlab::disk_coverage(eigs, 0.6), WithinRel(1.0, 1e-15));
  CHECK_THROWS_AS(rcmlab::disk_coverage(eigs, -0.1), std::domain_error);
}

TEST_CASE("spectra of moderate samples lean toward the circular law", "[measures]") {
  rcmlab::SplitMix64 rng(21);
  const auto M = sample_combinatorial(rcmlab::ModelParams{200, 0, 24, 0}, rng);
  const auto eigs = rcmlab::eigenvalues(rcmlab::normalize(M));
  const double ks = rcmlab::ks_radial(eigs, ReferenceMeasure::circular());
  CHECK(ks < 0.2);
  CHECK(rcmlab::disk_coverage(eigs, 0.2) > 0.9);
}

TEST_CASE("replacement gap is finite and small for well-shifted z", "[measures]") {
  rcmlab::SplitMix64 rng(22);
  const auto M = sample_combinatorial(rcmlab::ModelParams{60, 0, 12, 0}, rng);
  const auto B = rcmlab::sample_bernoulli(60, 0.2, rng);
  const double gap = rcmlab::replacement_gap(M, B, Complex(0.5, 0.5));
  CHECK(std::isfinite(gap));
  CHECK(std::abs(gap) < 1.0);

  rcmlab::RowSupportMatrix wrong;
  wrong.n = 3;
  wrong.m = 2;
  wrong.d = 1;
  wrong.supports = {{0}, {1}};
  CHECK_THROWS_AS(rcmlab::replacement_gap(wrong, B, Complex(0, 0)), std::invalid_argument);
}
