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
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace rcmlab {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double stderr_mean = 0.0;
};

inline Summary summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("summarize: empty sample");
  Summary s;
  s.count = xs.size();
  double acc = 0.0;
  for (double x : xs) acc += x;
  s.mean = acc / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(xs.size() - 1);
    s.stderr_mean = std::sqrt(s.variance / static_cast<double>(xs.size()));
  }
  return s;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Standard error of an empirical frequency, with an additive 1/N floor under
// the root so a frequency of exactly 0 or 1 still yields a usable scale.
inline double frequency_stderr(double freq, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("frequency_stderr: no trials");
  const double n = static_cast<double>(trials);
  return std::sqrt((freq * (1.0 - freq) + 1.0 / n) / n);
}

// Kolmogorov-Smirnov statistic of samples already mapped through their null
// CDF, i.e. values in [0,1] compared against the uniform distribution.
// sup_x |F_n(x) - x| evaluated at the jump points and their left limits.
inline double uniform_ks_statistic(std::vector<double> u) {
  if (u.empty()) throw std::invalid_argument("uniform_ks_statistic: empty sample");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double hi = (static_cast<double>(i) + 1.0) / n - u[i];
    const double lo = u[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

// KS statistic of raw samples against an arbitrary continuous CDF.
inline double ks_statistic(const std::vector<double>& xs,
                           const std::function<double(double)>& cdf) {
  std::vector<double> u;
  u.reserve(xs.size());
  for (double x : xs) u.push_back(cdf(x));
  return uniform_ks_statistic(std::move(u));
}

// Pearson chi-square statistic for observed counts against expected counts.
inline double chi_square_statistic(const std::vector<double>& observed,
                                   const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_statistic: size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::domain_error("chi_square_statistic: nonpositive expectation");
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  return stat;
}

// Upper tail P(X >= stat) for X chi-square with `dof` degrees of freedom.
inline double chi_square_pvalue(double stat, double dof) {
  if (dof <= 0.0) throw std::domain_error("chi_square_pvalue: dof must be positive");
  if (stat <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

inline double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P(Hypergeometric(n, k, d) = s): s marked elements in a uniform d-subset of
// [n] of which k elements are marked.
inline double hypergeometric_pmf(long long n, long long k, long long d, long long s) {
  if (n < 0 || k < 0 || k > n || d < 0 || d > n)
    throw std::domain_error("hypergeometric_pmf: invalid parameters");
  if (s < 0 || s > k || d - s < 0 || d - s > n - k) return 0.0;
  const double ln = log_choose(static_cast<double>(k), static_cast<double>(s)) +
                    log_choose(static_cast<double>(n - k), static_cast<double>(d - s)) -
                    log_choose(static_cast<double>(n), static_cast<double>(d));
  return std::exp(ln);
}

inline double binomial_pmf(long long n, double p, long long s) {
  if (p < 0.0 || p > 1.0 || n < 0) throw std::domain_error("binomial_pmf: invalid parameters");
  if (s < 0 || s > n) return 0.0;
  if (p == 0.0) return s == 0 ? 1.0 : 0.0;
  if (p == 1.0) return s == n ? 1.0 : 0.0;
  const double ln = log_choose(static_cast<double>(n), static_cast<double>(s)) +
                    static_cast<double>(s) * std::log(p) +
                    static_cast<double>(n - s) * std::log1p(-p);
  return std::exp(ln);
}

}  // namespace rcmlab
