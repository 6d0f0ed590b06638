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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rcmlab/distance.hpp"
#include "rcmlab/enumeration.hpp"
#include "rcmlab/graph_stats.hpp"
#include "rcmlab/matrix_io.hpp"
#include "rcmlab/model.hpp"
#include "rcmlab/reference_measures.hpp"
#include "rcmlab/spectral.hpp"
#include "rcmlab/stats.hpp"
#include "rcmlab/svg.hpp"
#include "rcmlab/threshold.hpp"
#include "rcmlab/vector_classes.hpp"

namespace rcmlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"esd",      "ssv_sweep", "norm_sweep",
                                                 "expansion", "distance",  "threshold",
                                                 "oracle",    "replacement"};
  return kinds;
}

// Flat, versioned experiment description. Every field has a serializable
// default so a config survives a JSON round trip bit-for-bit.
struct ExperimentConfig {
  int version = 1;
  std::string kind;
  long long n = 0;
  long long m = 0;  // 0 means n
  long long d = 0;
  double z_re = 0.0;
  double z_im = 0.0;
  long long trials = 1;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string preset;  // "" or "relaxed"
  // Constant overrides; 0 means "use the built-in default".
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;
  double c2 = 1.0, c1 = 1.0;
  double s_threshold = 0.0;  // 0 means n^{-9}
  long long k = 0;           // distance: dim(V); expansion: |J|
  double p = 0.0;            // distance: Bernoulli parameter
  double eps = 0.1;          // expansion tolerance
  std::string d_list;        // sweeps: comma-separated d values

  bool operator==(const ExperimentConfig&) const = default;
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  return nlohmann::json{
      {"version", c.version}, {"kind", c.kind},
      {"n", c.n},             {"m", c.m},
      {"d", c.d},             {"z_re", c.z_re},
      {"z_im", c.z_im},       {"trials", c.trials},
      {"seed", c.seed},       {"out", c.out},
      {"preset", c.preset},   {"a1", c.a1},
      {"a2", c.a2},           {"a3", c.a3},
      {"c2", c.c2},           {"c1", c.c1},
      {"s_threshold", c.s_threshold},
      {"k", c.k},             {"p", c.p},
      {"eps", c.eps},         {"d_list", c.d_list}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "version") c.version = value.get<int>();
      else if (key == "kind") c.kind = value.get<std::string>();
      else if (key == "n") c.n = value.get<long long>();
      else if (key == "m") c.m = value.get<long long>();
      else if (key == "d") c.d = value.get<long long>();
      else if (key == "z_re") c.z_re = value.get<double>();
      else if (key == "z_im") c.z_im = value.get<double>();
      else if (key == "trials") c.trials = value.get<long long>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "preset") c.preset = value.get<std::string>();
      else if (key == "a1") c.a1 = value.get<double>();
      else if (key == "a2") c.a2 = value.get<double>();
      else if (key == "a3") c.a3 = value.get<double>();
      else if (key == "c2") c.c2 = value.get<double>();
      else if (key == "c1") c.c1 = value.get<double>();
      else if (key == "s_threshold") c.s_threshold = value.get<double>();
      else if (key == "k") c.k = value.get<long long>();
      else if (key == "p") c.p = value.get<double>();
      else if (key == "eps") c.eps = value.get<double>();
      else if (key == "d_list") c.d_list = value.get<std::string>();
      else throw ConfigError("config: unknown key \"" + key + "\"");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: bad value for \"" + key + "\": " + e.what());
    }
  }
  if (c.version != 1) throw ConfigError("config: unsupported version");
  return c;
}

inline std::vector<long long> parse_d_list(const std::string& text) {
  std::vector<long long> ds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("config: d_list entry \"" + item + "\" is not an integer");
    }
    if (used != item.size()) throw ConfigError("config: d_list entry \"" + item + "\" is not an integer");
    ds.push_back(v);
  }
  return ds;
}

namespace detail {
inline std::vector<long long> sweep_ds(const ExperimentConfig& c) {
  auto ds = parse_d_list(c.d_list);
  if (ds.empty() && c.d > 0) ds.push_back(c.d);
  return ds;
}
}  // namespace detail

// Validates every module precondition the run will rely on; nothing is
// sampled before this passes.
inline void validate(const ExperimentConfig& c) {
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    throw ConfigError("config: unknown kind \"" + c.kind + "\"");
  if (!c.preset.empty() && c.preset != "relaxed")
    throw ConfigError("config: unknown preset \"" + c.preset + "\"");
  if (c.trials < 1) throw ConfigError("config: trials must be >= 1");
  if (c.out.empty()) throw ConfigError("config: out directory must be set");
  if (c.n < 1) throw ConfigError("config: n must be >= 1");
  if (c.m < 0) throw ConfigError("config: m must be >= 0");

  const long long rows = c.m > 0 ? c.m : c.n;
  const bool needs_square =
      c.kind == "esd" || c.kind == "ssv_sweep" || c.kind == "threshold" || c.kind == "replacement";
  if (needs_square && rows != c.n) throw ConfigError("config: " + c.kind + " needs a square matrix");

  if (c.kind == "esd" || c.kind == "replacement") {
    if (c.d < 1 || c.d >= c.n)
      throw ConfigError("config: " + c.kind + " needs 1 <= d < n (normalization scale)");
  } else if (c.kind == "norm_sweep" || c.kind == "oracle") {
    if (c.d < 1 || c.d > c.n) throw ConfigError("config: needs 1 <= d <= n");
  } else if (c.kind == "expansion") {
    if (c.d < 1 || c.d > c.n) throw ConfigError("config: needs 1 <= d <= n");
    if (c.k < 1 || c.k > c.n) throw ConfigError("config: expansion needs 1 <= k <= n");
    if (!(c.eps >= 0.0)) throw ConfigError("config: expansion needs eps >= 0");
  } else if (c.kind == "distance") {
    if (c.k < 1 || c.k >= c.n) throw ConfigError("config: distance needs 1 <= k < n");
    if (c.d > 0) {
      if (c.d > c.n) throw ConfigError("config: distance fixed-sum d must be <= n");
    } else if (!(c.p > 0.0 && c.p < 1.0)) {
      throw ConfigError("config: distance needs p in (0, 1) or a fixed-sum d");
    }
  } else if (c.kind == "ssv_sweep" || c.kind == "threshold") {
    const auto ds = detail::sweep_ds(c);
    if (ds.empty()) throw ConfigError("config: sweep needs d or d_list");
    for (long long d : ds)
      if (d < 1 || d > c.n) throw ConfigError("config: sweep d values must lie in [1, n]");
  }
  if (c.kind == "oracle") {
    // Enumerability is part of the config contract: refuse before running.
    try {
      MatrixEnumerator probe(c.n, c.d);
      (void)probe;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Records and parallel execution
// ---------------------------------------------------------------------------

struct TrialRecord {
  long long trial = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> payload;  // column -> formatted value
  double wall_ms = 0.0;
};

// Worker cap: RCMLAB_THREADS when set, hardware concurrency otherwise, never
// more than the trial count.
inline int worker_count(long long trials) {
  long long cap = 0;
  if (const char* env = std::getenv("RCMLAB_THREADS")) {
    try {
      cap = std::stoll(env);
    } catch (const std::exception&) {
      cap = 0;
    }
  }
  if (cap < 1) cap = static_cast<long long>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  return static_cast<int>(std::min(cap, std::max<long long>(trials, 1)));
}

namespace detail {
// Runs fn(trial) for trial in [0, trials) on a shared work queue. Each call
// must touch only its own slot; exceptions are replayed after the join.
template <class Fn>
inline void parallel_trials(long long trials, Fn&& fn) {
  const int workers = worker_count(trials);
  if (workers <= 1) {
    for (long long t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<long long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto drain = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const long long t = next.fetch_add(1);
      if (t >= trials) break;
      try {
        fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::string fmt_ll(long long v) { return std::to_string(v); }
inline std::string fmt_bool(bool b) { return b ? "1" : "0"; }
}  // namespace detail

// ---------------------------------------------------------------------------
// Result bundle
// ---------------------------------------------------------------------------

struct RunResult {
  std::filesystem::path out_dir;
  nlohmann::json summary;
  std::vector<TrialRecord> trials;
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline void write_trials_csv(const std::filesystem::path& path,
                             const std::vector<TrialRecord>& records) {
  std::string csv = "trial,seed";
  if (!records.empty())
    for (const auto& [name, value] : records.front().payload) csv += "," + name;
  csv += "\n";
  for (const auto& rec : records) {
    csv += std::to_string(rec.trial) + "," + std::to_string(rec.seed);
    for (const auto& [name, value] : rec.payload) csv += "," + value;
    csv += "\n";
  }
  write_text_file(path, csv);
}

struct KindOutput {
  std::vector<TrialRecord> records;
  nlohmann::json summary;
  std::vector<Complex> plot_spectrum;  // nonempty -> plots/esd.svg
  std::string extra_name;              // optional second CSV artifact
  std::string extra_content;
  std::vector<std::pair<std::string, RowSupportMatrix>> hit_matrices;
};

inline nlohmann::json summary_of(const Summary& s) {
  return nlohmann::json{{"count", s.count},
                        {"mean", s.mean},
                        {"variance", s.variance},
                        {"stderr", s.stderr_mean}};
}

// --- esd ---------------------------------------------------------------

inline KindOutput run_esd(const ExperimentConfig& c) {
  KindOutput out;
  out.records.resize(static_cast<std::size_t>(c.trials));
  std::vector<double> ks_circ(static_cast<std::size_t>(c.trials));
  std::vector<double> ks_km(static_cast<std::size_t>(c.trials));
  std::vector<double> coverage(static_cast<std::size_t>(c.trials));
  std::vector<double> angular(static_cast<std::size_t>(c.trials));
  std::vector<Complex> first_spectrum;

  parallel_trials(c.trials, [&](long long t) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed_t = derive_seed(c.seed, static_cast<std::uint64_t>(t));
    SplitMix64 rng(seed_t);
    ModelParams params{static_cast<int>(c.n), static_cast<int>(c.n), static_cast<int>(c.d), 0};
    const RowSupportMatrix M = sample_combinatorial(params, rng);
    const auto eigs = eigenvalues(normalize(M));
    const std::size_t i = static_cast<std::size_t>(t);
    ks_circ[i] = ks_radial(eigs, ReferenceMeasure::circular());
    if (c.d >= 2) {
      // The fixed-d reference lives on the disk of radius sqrt(d); bring the
      // unit-scaled spectrum onto that disk before comparing.
      std::vector<Complex> on_km_scale(eigs.size());
      const double root_d = std::sqrt(static_cast<double>(c.d));
      for (std::size_t s = 0; s < eigs.size(); ++s) on_km_scale[s] = eigs[s] * root_d;
      ks_km[i] = ks_radial(on_km_scale, ReferenceMeasure::oriented_km(static_cast<int>(c.d)));
    } else {
      ks_km[i] = std::numeric_limits<double>::quiet_NaN();
    }
    coverage[i] = disk_coverage(eigs, 0.1);
    angular[i] = angular_ks(eigs);
    if (t == 0) first_spectrum = eigs;

    TrialRecord rec;
    rec.trial = t;
    rec.seed = seed_t;
    rec.payload = {{"ks_circular", format_double(ks_circ[i])},
                   {"ks_km", format_double(ks_km[i])},
                   {"coverage_0p1", format_double(coverage[i])},
                   {"angular_ks", format_double(angular[i])}};
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.records[i] = std::move(rec);
  });

  out.plot_spectrum = std::move(first_spectrum);
  out.summary = {{"ks_circular", summary_of(summarize(ks_circ))},
                 {"coverage_0p1", summary_of(summarize(coverage))},
                 {"angular_ks", summary_of(summarize(angular))}};
  if (c.d >= 2) out.summary["ks_km"] = summary_of(summarize(ks_km));
  return out;
}

// --- ssv_sweep -----------------------------------------------------------

inline KindOutput run_ssv_sweep(const ExperimentConfig& c) {
  KindOutput out;
  const auto ds = sweep_ds(c);
  const long long total = static_cast<long long>(ds.size()) * c.trials;
  out.records.resize(static_cast<std::size_t>(total));
  std::vector<std::vector<double>> smins(ds.size(),
                                         std::vector<double>(static_cast<std::size_t>(c.trials)));
  const Complex z(c.z_re, c.z_im);

  parallel_trials(total, [&](long long w) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t di = static_cast<std::size_t>(w / c.trials);
    const long long t = w % c.trials;
    const std::uint64_t seed_t =
        derive_seed(derive_seed(c.seed, static_cast<std::uint64_t>(di)), static_cast<std::uint64_t>(t));
    SplitMix64 rng(seed_t);
    ModelParams params{static_cast<int>(c.n), static_cast<int>(c.n), static_cast<int>(ds[di]), 0};
    const RowSupportMatrix M = sample_combinatorial(params, rng);
    const double smin = smallest_singular_value(M, z);
    smins[di][static_cast<std::size_t>(t)] = smin;

    TrialRecord rec;
    rec.trial = w;
    rec.seed = seed_t;
    rec.payload = {{"d", fmt_ll(ds[di])}, {"rep", fmt_ll(t)}, {"smin", format_double(smin)}};
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.records[static_cast<std::size_t>(w)] = std::move(rec);
  });

  nlohmann::json per_d = nlohmann::json::array();
  for (std::size_t di = 0; di < ds.size(); ++di) {
    auto xs = smins[di];
    per_d.push_back({{"d", ds[di]},
                     {"min", *std::min_element(xs.begin(), xs.end())},
                     {"median", median(xs)},
                     {"max", *std::max_element(xs.begin(), xs.end())}});
  }
  out.summary = {{"smin_by_d", per_d}};
  return out;
}

// --- norm_sweep ----------------------------------------------------------

inline KindOutput run_norm_sweep(const ExperimentConfig& c) {
  KindOutput out;
  out.records.resize(static_cast<std::size_t>(c.trials));
  std::vector<double> ratios(static_cast<std::size_t>(c.trials));
  const long long rows = c.m > 0 ? c.m : c.n;

  parallel_trials(c.trials, [&](long long t) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed_t = derive_seed(c.seed, static_cast<std::uint64_t>(t));
    SplitMix64 rng(seed_t);
    ModelParams params{static_cast<int>(c.n), static_cast<int>(rows), static_cast<int>(c.d), 0};
    const RowSupportMatrix M = sample_combinatorial(params, rng);
    const double norm = restricted_norm(M);
    const std::size_t i = static_cast<std::size_t>(t);
    ratios[i] = norm / std::sqrt(static_cast<double>(c.d));

    TrialRecord rec;
    rec.trial = t;
    rec.seed = seed_t;
    rec.payload = {{"norm", format_double(norm)}, {"ratio_sqrt_d", format_double(ratios[i])}};
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.records[i] = std::move(rec);
  });

  const double lower = restricted_norm_lower_bound(c.n, c.d);
  long long below = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double norm = ratios[i] * std::sqrt(static_cast<double>(c.d));
    if (norm < lower * (1.0 - 1e-12)) ++below;
  }
  out.summary = {{"ratio_sqrt_d", summary_of(summarize(ratios))},
                 {"lower_bound", lower},
                 {"below_lower_bound", below}};
  return out;
}

// --- expansion -----------------------------------------------------------

inline KindOutput run_expansion(const ExperimentConfig& c) {
  KindOutput out;
  out.records.resize(static_cast<std::size_t>(c.trials));
  std::atomic<long long> holds_both{0};

  parallel_trials(c.trials, [&](long long t) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed_t = derive_seed(c.seed, static_cast<std::uint64_t>(t));
    SplitMix64 rng(seed_t);
    const long long rows = c.m > 0 ? c.m : c.n;
    ModelParams params{static_cast<int>(c.n), static_cast<int>(rows), static_cast<int>(c.d), 0};
    const RowSupportMatrix M = sample_combinatorial(params, rng);
    SplitMix64 subset_rng(derive_seed(seed_t, 1));
    const ExpansionReport rep = expansion_check(M, c.k, c.eps, &subset_rng);
    if (rep.holds_in && rep.holds_out) holds_both.fetch_add(1);

    TrialRecord rec;
    rec.trial = t;
    rec.seed = seed_t;
    rec.payload = {{"holds_in", fmt_bool(rep.holds_in)},
                   {"holds_out", fmt_bool(rep.holds_out)},
                   {"worst_value", fmt_ll(rep.worst_value)},
                   {"subsets_checked", fmt_ll(rep.subsets_checked)},
                   {"exhaustive", fmt_bool(rep.exhaustive)}};
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.records[static_cast<std::size_t>(t)] = std::move(rec);
  });

  out.summary = {{"k", c.k},
                 {"eps", c.eps},
                 {"fraction_holding", static_cast<double>(holds_both.load()) /
                                          static_cast<double>(c.trials)}};
  return out;
}

// --- distance ------------------------------------------------------------

inline KindOutput run_distance(const ExperimentConfig& c) {
  KindOutput out;
  // The frame is shared by all trials; its seed sits outside the trial range.
  SplitMix64 frame_rng(derive_seed(c.seed, static_cast<std::uint64_t>(c.trials)));
  const Eigen::MatrixXcd frame = random_orthonormal_frame(c.n, c.k, frame_rng, true);
  const double p = c.d > 0 ? static_cast<double>(c.d) / static_cast<double>(c.n) : c.p;
  const Eigen::VectorXcd u = Eigen::VectorXcd::Zero(c.n);
  const DistanceExperiment exp = make_distance_experiment(frame, p, u, c.trials);
  const DistanceModel model =
      c.d > 0 ? DistanceModel::fixed_sum(c.d) : DistanceModel::bernoulli();

  out.records.resize(static_cast<std::size_t>(c.trials));
  std::vector<double> rs(static_cast<std::size_t>(c.trials));
  std::vector<double> r2s(static_cast<std::size_t>(c.trials));

  parallel_trials(c.trials, [&](long long t) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed_t = derive_seed(c.seed, static_cast<std::uint64_t>(t));
    SplitMix64 rng(seed_t);
    const DistanceTrial trial = distance_trial(exp, rng, model);
    const std::size_t i = static_cast<std::size_t>(t);
    rs[i] = trial.r;
    r2s[i] = trial.r_squared;

    TrialRecord rec;
    rec.trial = t;
    rec.seed = seed_t;
    rec.payload = {{"r", format_double(trial.r)}, {"r_squared", format_double(trial.r_squared)}};
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.records[i] = std::move(rec);
  });

  const double dup = d_uprime(exp);
  const double D = D_p(p, c.n, c.k, dup);
  const Summary sr = summarize(rs);
  out.summary = {{"model", c.d > 0 ? "fixed_sum" : "bernoulli"},
                 {"p", p},
                 {"d_uprime", dup},
                 {"D_p", D},
                 {"r", summary_of(sr)},
                 {"r_squared", summary_of(summarize(r2s))},
                 {"mean_r_in_bracket", sr.mean >= 0.5 * D && sr.mean <= D},
                 {"in_regime", exp.in_regime}};

  std::string csv = "trial,r,r_squared\n";
  for (std::size_t i = 0; i < rs.size(); ++i)
    csv += std::to_string(i) + "," + format_double(rs[i]) + "," + format_double(r2s[i]) + "\n";
  out.extra_name = "distance.csv";
  out.extra_content = std::move(csv);
  return out;
}

// --- threshold -----------------------------------------------------------

inline KindOutput run_threshold(const ExperimentConfig& c) {
  KindOutput out;
  ThresholdSweep sweep{c.n, sweep_ds(c), c.trials, c.seed};
  const double cutoff = c.s_threshold > 0.0 ? c.s_threshold : default_smin_threshold(c.n);
  const auto points = singularity_frequency(sweep, cutoff);

  std::string csv = "d,trials,freq_zero_col,mean_X,formula_EX,freq_singular\n";
  nlohmann::json per_d = nlohmann::json::array();
  long long trial_counter = 0;
  for (const auto& pt : points) {
    csv += fmt_ll(pt.d) + "," + fmt_ll(pt.trials) + "," + format_double(pt.freq_zero_col) + "," +
           format_double(pt.mean_X) + "," + format_double(pt.formula_EX) + "," +
           format_double(pt.freq_singular) + "\n";
    per_d.push_back({{"d", pt.d},
                     {"freq_zero_col", pt.freq_zero_col},
                     {"mean_X", pt.mean_X},
                     {"formula_EX", pt.formula_EX},
                     {"freq_singular", pt.freq_singular},
                     {"poisson_estimate", zero_column_poisson_estimate(pt.mean_X)},
                     {"in_regime", pt.in_regime}});
    for (std::size_t h = 0; h < pt.singular_hits.size(); ++h)
      out.hit_matrices.emplace_back(
          "hit_d" + std::to_string(pt.d) + "_" + std::to_string(h) + ".rcm", pt.singular_hits[h]);
    for (long long t = 0; t < pt.trials; ++t) {
      TrialRecord rec;
      rec.trial = trial_counter++;
      rec.seed = 0;  // per-point seeds are derived inside the sweep
      rec.payload = {{"d", fmt_ll(pt.d)},
                     {"rep", fmt_ll(t)},
                     {"zero_cols", format_double(pt.x_samples[static_cast<std::size_t>(t)])},
                     {"smin", format_double(pt.smin_samples[static_cast<std::size_t>(t)])}};
      out.records.push_back(std::move(rec));
    }
  }
  out.summary = {{"s_threshold", cutoff}, {"points", per_d}};
  out.extra_name = "sweep.csv";
  out.extra_content = std::move(csv);
  return out;
}

// --- oracle --------------------------------------------------------------

inline KindOutput run_oracle(const ExperimentConfig& c) {
  KindOutput out;
  const auto singular = exact_singularity_probability(c.n, c.d);
  const auto moments = exact_zero_column_moments(c.n, c.d);
  const auto events = exact_event_probabilities(c.n, c.d);
  const BigRational formula = zero_column_mean_formula(c.n, c.d);
  out.summary = {{"singularity", singular.str()},
                 {"zero_col_mean", moments.ex.str()},
                 {"zero_col_mean_formula", formula.str()},
                 {"zero_col_second_moment", moments.ex2.str()},
                 {"events",
                  {{"zero_col", events.zero_col.str()},
                   {"dup_rows", events.dup_rows.str()},
                   {"dup_cols", events.dup_cols.str()},
                   {"singular", events.singular.str()}}},
                 {"states", big_pow(big_binomial(c.n, c.d), c.n).str()}};
  if (moments.ex != formula)
    throw std::logic_error("oracle: enumerated zero-column mean disagrees with the closed form");
  return out;
}

// --- replacement ---------------------------------------------------------

inline KindOutput run_replacement(const ExperimentConfig& c) {
  KindOutput out;
  out.records.resize(static_cast<std::size_t>(c.trials));
  std::vector<double> gaps(static_cast<std::size_t>(c.trials));
  const Complex z(c.z_re, c.z_im);

  parallel_trials(c.trials, [&](long long t) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed_t = derive_seed(c.seed, static_cast<std::uint64_t>(t));
    SplitMix64 rng(seed_t);
    ModelParams params{static_cast<int>(c.n), static_cast<int>(c.n), static_cast<int>(c.d), 0};
    const RowSupportMatrix M = sample_combinatorial(params, rng);
    const DenseComplexMatrix B =
        sample_bernoulli(static_cast<int>(c.n), static_cast<double>(c.d) / static_cast<double>(c.n), rng);
    const double gap = replacement_gap(M, B, z);
    const std::size_t i = static_cast<std::size_t>(t);
    gaps[i] = gap;

    TrialRecord rec;
    rec.trial = t;
    rec.seed = seed_t;
    rec.payload = {{"gap", format_double(gap)}};
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.records[i] = std::move(rec);
  });

  std::vector<double> abs_gaps;
  abs_gaps.reserve(gaps.size());
  for (double g : gaps) abs_gaps.push_back(std::abs(g));
  out.summary = {{"z_re", c.z_re},
                 {"z_im", c.z_im},
                 {"gap", summary_of(summarize(gaps))},
                 {"median_abs_gap", median(abs_gaps)}};
  return out;
}

}  // namespace detail

// Runs the experiment and writes the bundle: config.json (echo), trials.csv,
// summary.json, and kind-specific artifacts (plots/esd.svg, sweep.csv,
// distance.csv, hits/*.rcm). Everything except wall_ms in summary.json is a
// pure function of the config.
inline RunResult run(const ExperimentConfig& config) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();

  detail::KindOutput out;
  if (config.kind == "esd") out = detail::run_esd(config);
  else if (config.kind == "ssv_sweep") out = detail::run_ssv_sweep(config);
  else if (config.kind == "norm_sweep") out = detail::run_norm_sweep(config);
  else if (config.kind == "expansion") out = detail::run_expansion(config);
  else if (config.kind == "distance") out = detail::run_distance(config);
  else if (config.kind == "threshold") out = detail::run_threshold(config);
  else if (config.kind == "oracle") out = detail::run_oracle(config);
  else out = detail::run_replacement(config);

  RunResult result;
  result.out_dir = std::filesystem::path(config.out);
  std::filesystem::create_directories(result.out_dir);

  detail::write_text_file(result.out_dir / "config.json", config_to_json(config).dump(2) + "\n");
  detail::write_trials_csv(result.out_dir / "trials.csv", out.records);

  nlohmann::json summary = {{"kind", config.kind},
                            {"n", config.n},
                            {"d", config.d},
                            {"trials", config.trials},
                            {"results", out.summary}};
  summary["wall_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  detail::write_text_file(result.out_dir / "summary.json", summary.dump(2) + "\n");

  if (!out.plot_spectrum.empty()) {
    std::filesystem::create_directories(result.out_dir / "plots");
    plot_spectrum(out.plot_spectrum, (result.out_dir / "plots" / "esd.svg").string());
  }
  if (!out.extra_name.empty())
    detail::write_text_file(result.out_dir / out.extra_name, out.extra_content);
  if (!out.hit_matrices.empty()) {
    std::filesystem::create_directories(result.out_dir / "hits");
    for (const auto& [name, M] : out.hit_matrices)
      save_rcm((result.out_dir / "hits" / name).string(), M);
  }

  result.summary = std::move(summary);
  result.trials = std::move(out.records);
  return result;
}

}  // namespace rcmlab
