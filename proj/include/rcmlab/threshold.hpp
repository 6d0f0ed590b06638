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
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rcmlab/exact.hpp"
#include "rcmlab/model.hpp"
#include "rcmlab/rng.hpp"
#include "rcmlab/spectral.hpp"
#include "rcmlab/stats.hpp"

namespace rcmlab {

// ---------------------------------------------------------------------------
// Sweeps across d at fixed n
// ---------------------------------------------------------------------------

struct ThresholdSweep {
  long long n = 0;
  std::vector<long long> d_values;
  long long trials = 0;
  std::uint64_t master_seed = 0;
};

struct ThresholdPoint {
  long long d = 0;
  long long trials = 0;
  bool in_regime = true;        // d <= n/2
  double freq_zero_col = 0.0;   // empirical P(X >= 1), X = zero-column count
  double freq_zero_col_se = 0.0;
  double mean_X = 0.0;
  double mean_X_se = 0.0;
  double formula_EX = 0.0;      // n (1 - d/n)^n
  double freq_singular = -1.0;  // filled only by singularity_frequency
  double freq_singular_se = 0.0;
  std::vector<RowSupportMatrix> singular_hits;  // first few matrices under the threshold
  std::vector<double> x_samples;                // per-trial zero-column counts
  std::vector<double> smin_samples;             // per-trial s_min (with spectra only)
};

// Numerically-singular cutoff n^{-9}; inside the proven tail regime for
// d >= (log n)^2.
inline double default_smin_threshold(long long n) {
  return std::pow(static_cast<double>(n), -9.0);
}

// Poisson surrogate for P(X >= 1) given an observed mean of X.
inline double zero_column_poisson_estimate(double mean_x) { return -std::expm1(-mean_x); }

namespace detail {
inline void validate_sweep(const ThresholdSweep& sweep) {
  if (sweep.trials < 1) throw std::invalid_argument("ThresholdSweep: trials >= 1");
  if (sweep.d_values.empty()) throw std::invalid_argument("ThresholdSweep: empty d list");
  for (long long d : sweep.d_values)
    if (d < 1 || d > sweep.n) throw std::invalid_argument("ThresholdSweep: d outside [1, n]");
}

// Seeds are derived per (d position, trial) so points are independent of
// sweep order and trial scheduling.
inline std::uint64_t sweep_seed(std::uint64_t master, std::size_t d_index, long long trial) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(d_index)),
                     static_cast<std::uint64_t>(trial));
}

template <bool kWithSpectra>
inline std::vector<ThresholdPoint> run_sweep(const ThresholdSweep& sweep, double s_threshold,
                                             int max_hits) {
  validate_sweep(sweep);
  std::vector<ThresholdPoint> points;
  points.reserve(sweep.d_values.size());
  for (std::size_t di = 0; di < sweep.d_values.size(); ++di) {
    const long long d = sweep.d_values[di];
    ThresholdPoint pt;
    pt.d = d;
    pt.trials = sweep.trials;
    pt.in_regime = 2 * d <= sweep.n;
    pt.formula_EX = to_double(zero_column_mean_formula(sweep.n, d));
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(sweep.trials));
    long long zero_col_hits = 0, singular = 0;
    for (long long t = 0; t < sweep.trials; ++t) {
      SplitMix64 rng(sweep_seed(sweep.master_seed, di, t));
      ModelParams params{static_cast<int>(sweep.n), static_cast<int>(sweep.n),
                         static_cast<int>(d), 0};
      const RowSupportMatrix M = sample_combinatorial(params, rng);
      const long long zeros = count_zero_columns(M);
      xs.push_back(static_cast<double>(zeros));
      if (zeros >= 1) ++zero_col_hits;
      if constexpr (kWithSpectra) {
        const double smin = smallest_singular_value(M);
        pt.smin_samples.push_back(smin);
        if (smin <= s_threshold) {
          ++singular;
          if (static_cast<int>(pt.singular_hits.size()) < max_hits) pt.singular_hits.push_back(M);
        }
      }
    }
    const Summary sx = summarize(xs);
    pt.x_samples = xs;
    pt.mean_X = sx.mean;
    pt.mean_X_se = sx.stderr_mean;
    pt.freq_zero_col = static_cast<double>(zero_col_hits) / static_cast<double>(sweep.trials);
    pt.freq_zero_col_se = frequency_stderr(pt.freq_zero_col, sweep.trials);
    if constexpr (kWithSpectra) {
      pt.freq_singular = static_cast<double>(singular) / static_cast<double>(sweep.trials);
      pt.freq_singular_se = frequency_stderr(pt.freq_singular, sweep.trials);
    }
    points.push_back(std::move(pt));
  }
  return points;
}
}  // namespace detail

// Zero-column statistics only (no spectra): empirical P(X >= 1), mean of X,
// and the closed-form mean, per d.
inline std::vector<ThresholdPoint> zero_column_frequency(const ThresholdSweep& sweep) {
  return detail::run_sweep<false>(sweep, 0.0, 0);
}

// Adds the fraction of trials with s_min(M) <= s_threshold; matrices that hit
// the threshold are kept (up to max_hits per d) for inspection.
inline std::vector<ThresholdPoint> singularity_frequency(const ThresholdSweep& sweep,
                                                         double s_threshold, int max_hits = 4) {
  return detail::run_sweep<true>(sweep, s_threshold, max_hits);
}

// ---------------------------------------------------------------------------
// Paley-Zygmund lower bound
// ---------------------------------------------------------------------------

// P(X > lambda E X) >= (1 - lambda)^2 (E X)^2 / E X^2.
inline double paley_zygmund_bound(double ex, double ex2, double lambda) {
  if (!(ex2 > 0.0)) throw std::invalid_argument("paley_zygmund_bound: EX2 must be positive");
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("paley_zygmund_bound: lambda in [0, 1]");
  return (1.0 - lambda) * (1.0 - lambda) * ex * ex / ex2;
}

inline BigRational paley_zygmund_bound(const BigRational& ex, const BigRational& ex2,
                                       const BigRational& lambda) {
  if (!(ex2 > 0)) throw std::invalid_argument("paley_zygmund_bound: EX2 must be positive");
  if (lambda < 0 || lambda > 1)
    throw std::invalid_argument("paley_zygmund_bound: lambda in [0, 1]");
  const BigRational rest = BigRational(1) - lambda;
  return rest * rest * ex * ex / ex2;
}

}  // namespace rcmlab
