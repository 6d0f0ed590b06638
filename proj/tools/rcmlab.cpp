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

// Command-line front end. One subcommand per experiment kind; a --config
// JSON file supplies defaults and explicit flags override it. Exit codes:
// 0 success, 2 configuration or usage error, 3 numerical backend failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcmlab/harness.hpp"

namespace {

struct FlagSet {
  CLI::Option* n = nullptr;
  CLI::Option* m = nullptr;
  CLI::Option* d = nullptr;
  CLI::Option* z_re = nullptr;
  CLI::Option* z_im = nullptr;
  CLI::Option* trials = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* preset = nullptr;
  CLI::Option* a1 = nullptr;
  CLI::Option* a2 = nullptr;
  CLI::Option* a3 = nullptr;
  CLI::Option* c2 = nullptr;
  CLI::Option* c1 = nullptr;
  CLI::Option* s_threshold = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* p = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* d_list = nullptr;
};

rcmlab::ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rcmlab::ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw rcmlab::ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  return rcmlab::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for sparse random combinatorial matrices"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");

  rcmlab::ExperimentConfig flags;
  FlagSet set;
  set.n = app.add_option("--n", flags.n, "matrix dimension");
  set.m = app.add_option("--m", flags.m, "row count for tall matrices (default n)");
  set.d = app.add_option("--d", flags.d, "ones per row");
  set.z_re = app.add_option("--z-re", flags.z_re, "shift, real part");
  set.z_im = app.add_option("--z-im", flags.z_im, "shift, imaginary part");
  set.trials = app.add_option("--trials", flags.trials, "number of trials");
  set.seed = app.add_option("--seed", flags.seed, "master seed");
  set.out = app.add_option("--out", flags.out, "output directory");
  set.preset = app.add_option("--preset", flags.preset, "constant preset (relaxed)");
  set.a1 = app.add_option("--a1", flags.a1, "scale constant a1");
  set.a2 = app.add_option("--a2", flags.a2, "scale constant a2");
  set.a3 = app.add_option("--a3", flags.a3, "scale constant a3");
  set.c2 = app.add_option("--c2", flags.c2, "rate constant C2");
  set.c1 = app.add_option("--c1", flags.c1, "rate constant c1");
  set.s_threshold = app.add_option("--s-threshold", flags.s_threshold,
                                   "singularity cutoff (default n^-9)");
  set.k = app.add_option("--k", flags.k, "subspace dimension / subset size");
  set.p = app.add_option("--p", flags.p, "Bernoulli parameter for distance runs");
  set.eps = app.add_option("--eps", flags.eps, "expansion tolerance");
  set.d_list = app.add_option("--d-list", flags.d_list, "comma-separated d values for sweeps");

  for (const auto& kind : rcmlab::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    rcmlab::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    const auto subs = app.get_subcommands();
    if (!subs.empty()) cfg.kind = subs.front()->get_name();
    if (cfg.kind.empty()) throw rcmlab::ConfigError("no experiment kind given");

    if (set.n->count()) cfg.n = flags.n;
    if (set.m->count()) cfg.m = flags.m;
    if (set.d->count()) cfg.d = flags.d;
    if (set.z_re->count()) cfg.z_re = flags.z_re;
    if (set.z_im->count()) cfg.z_im = flags.z_im;
    if (set.trials->count()) cfg.trials = flags.trials;
    if (set.seed->count()) cfg.seed = flags.seed;
    if (set.out->count()) cfg.out = flags.out;
    if (set.preset->count()) cfg.preset = flags.preset;
    if (set.a1->count()) cfg.a1 = flags.a1;
    if (set.a2->count()) cfg.a2 = flags.a2;
    if (set.a3->count()) cfg.a3 = flags.a3;
    if (set.c2->count()) cfg.c2 = flags.c2;
    if (set.c1->count()) cfg.c1 = flags.c1;
    if (set.s_threshold->count()) cfg.s_threshold = flags.s_threshold;
    if (set.k->count()) cfg.k = flags.k;
    if (set.p->count()) cfg.p = flags.p;
    if (set.eps->count()) cfg.eps = flags.eps;
    if (set.d_list->count()) cfg.d_list = flags.d_list;

    const rcmlab::RunResult result = rcmlab::run(cfg);
    std::cout << "wrote " << (result.out_dir / "summary.json").string() << " ("
              << result.trials.size() << " trial rows)\n";
    return 0;
  } catch (const rcmlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rcmlab::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
