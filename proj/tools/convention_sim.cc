// Copyright 2026 The Convention Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// convention_sim: runs one of the three simulations and writes CSV logs.
//
//   convention_sim --sim sim1 --regime all --runs 16 --seed 1 --out results/
//   convention_sim --config run.json --set n_steps=500 --out results/

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convention/run_config.h"

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical convention-formation simulations"};
  std::string config_path;
  std::optional<std::string> sim, regime, out;
  std::optional<int> runs, workers;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool validate_only = false;
  app.add_option("--config", config_path, "JSON config file (flat keys)")->check(CLI::ExistingFile);
  app.add_option("--sim", sim, "sim1, sim2 or sim3");
  app.add_option("--regime", regime, "partial, complete, none or all");
  app.add_option("--runs", runs, "independent runs (networks for sim3)");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out, "existing output directory");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--set", overrides, "key=value override, repeatable");
  app.add_flag("--validate", validate_only, "check the config and exit");
  CLI11_PARSE(app, argc, argv);

  convention::RunConfig config;
  try {
    if (!config_path.empty()) config = convention::LoadConfigFile(config_path);
    if (sim) config.sim = *sim;
    if (regime) config.regime = *regime;
    if (runs) config.n_runs = *runs;
    if (seed) config.seed = *seed;
    if (out) config.output_dir = *out;
    if (workers) config.workers = *workers;
    for (const auto& o : overrides) convention::ApplyOverride(config, o);
  } catch (const std::exception& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  }

  if (validate_only) {
    const auto diagnostics = convention::validate(config);
    for (const auto& d : diagnostics) std::cerr << "invalid config: " << d << '\n';
    if (diagnostics.empty()) std::cout << convention::ToJson(config).dump(2) << '\n';
    return diagnostics.empty() ? 0 : 2;
  }
  return convention::run(config, std::cerr);
}
