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

// Run configuration, output writers and the driver behind convention_sim.

#ifndef CONVENTION_RUN_CONFIG_H_
#define CONVENTION_RUN_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "convention/lexicon.h"
#include "json.hpp"

namespace convention {

inline constexpr const char* kToolVersion = "convention_sim 0.1.0";

// Flat keys; the JSON config file and manifest use the member names.
struct RunConfig {
  std::string sim = "sim1";
  std::string regime = "all";  // partial|complete|none|all
  int n_runs = 16;
  std::uint64_t seed = 0;
  // fit
  int n_steps = 2000;
  double learning_rate = 0.05;
  int n_mc_elbo = 8;
  int n_mc_predictive = 2000;
  double average_fraction = 0.5;
  // rsa
  double w_I = 11.0;
  double w_C = 7.0;
  // prior
  double theta_prior_std = 1.0;
  double phi_drift_std = 1.0;
  double bias = 0.3;  // sim2/sim3 only
  // cadence; n_partners 0 means 4 for sim1 and 3 for sim2
  int n_partners = 0;
  int trials_per_partner = 4;
  int n_agents = 4;
  int trials_per_pair = 8;
  std::string alignment = "modal";  // modal|sampled
  int n_bootstrap = 1000;
  std::string output_dir;
  int workers = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Every violation, one message per field; empty when the config is usable.
// output_dir is checked by run(), not here.
std::vector<std::string> validate(const RunConfig& config);

nlohmann::json ToJson(const RunConfig& config);
// Applies the keys present in `doc` on top of `base`. Unknown keys and type
// mismatches throw. A "tool_version" key (as found in manifests) is ignored.
RunConfig FromJson(const nlohmann::json& doc, RunConfig base = {});
RunConfig LoadConfigFile(const std::string& path, RunConfig base = {});
// key=value override; the value is parsed according to the field's type.
void ApplyOverride(RunConfig& config, const std::string& assignment);

// Shortest round-trip decimal form.
std::string FormatNumber(double value);

// Runs the configured simulation(s) and writes trials.csv, summary.csv,
// manifest.json and (sim3) alignment.csv. Returns 0 on success, 2 for an
// invalid config or output directory, 1 for a failure while simulating;
// messages go to `err`.
int run(const RunConfig& config, std::ostream& err);

}  // namespace convention

#endif  // CONVENTION_RUN_CONFIG_H_
