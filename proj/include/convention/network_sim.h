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

// Scenario harness for the three reference-game simulations:
//   sim1  a learning listener hears a scripted speaker; new partner every
//         few trials.
//   sim2  a learning speaker talks to an oracle listener; tracks how long
//         its utterances are expected to be.
//   sim3  four learning agents play in round-robin dyads; tracks whether
//         agents settle on the same one-word labels.

#ifndef CONVENTION_NETWORK_SIM_H_
#define CONVENTION_NETWORK_SIM_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "convention/agents.h"

namespace convention {

struct Pairing {
  int a = 0;
  int b = 0;
  friend bool operator==(const Pairing&, const Pairing&) = default;
};

// Within a block agent a speaks on even trials and b on odd trials.
struct Schedule {
  std::vector<std::vector<Pairing>> blocks;
  int trials_per_block = 8;

  int PartnerOf(int block, int agent) const;
  bool Paired(int block, int x, int y) const;
};

// Circle-method round robin over agents 0..n_agents-1. n_agents must be even.
Schedule round_robin(int n_agents, int trials_per_block = 8);

enum class Sim { kSim1, kSim2, kSim3 };
const char* SimName(Sim sim);
Sim ParseSim(const std::string& name);

struct TrialRecord {
  int run_id = 0;
  Sim sim = Sim::kSim1;
  PoolingRegime regime = PoolingRegime::kPartial;
  int block = 0;  // 1-based
  int trial = 0;  // 1-based, counted per speaker/listener pair within a run
  int partner_index = 0;  // 1-based index of the current partner
  int speaker_id = 0;
  int listener_id = 0;
  ObjectId target;
  Utterance utterance = Utterance::Primitive(0);
  ObjectId choice;
  // Listener's predictive probability of the target; 1 for the oracle.
  double listener_target_prob = 0.0;
  double utterance_length = 0.0;
  // E[cost(u)] under the speaker's predictive for the target.
  double expected_utterance_length = 0.0;
};

enum class PairType { kWithin, kAcross };
const char* PairTypeName(PairType type);

struct AlignmentRecord {
  int run_id = 0;
  PoolingRegime regime = PoolingRegime::kPartial;
  int block = 0;
  PairType pair_type = PairType::kWithin;
  int agent_a = 0;
  int agent_b = 0;
  ObjectId target;
  bool aligned = false;
};

enum class AlignmentMode {
  // Compare each agent's most probable single-primitive utterance.
  kModal,
  // Compare one primitive sampled from each agent's predictive, restricted
  // to primitives.
  kSampled,
};

struct ScenarioOptions {
  // sim1/sim2 cadence; 0 picks 4 partners for sim1 and 3 for sim2.
  int n_partners = 0;
  int trials_per_partner = 4;
  // sim3.
  int n_agents = 4;
  int trials_per_pair = 8;
  AlignmentMode alignment = AlignmentMode::kModal;
  // Worker threads for independent runs.
  int workers = 1;
};

struct SimResult {
  std::vector<TrialRecord> trials;
  std::vector<AlignmentRecord> alignment;
};

// Default scenario configs: sim1 uses 2 objects x 2 equal-cost primitives
// with a symmetric prior; sim2 and sim3 use 2 objects x 4 primitives plus
// their pairwise conjunctions with a weakly biased prior.
RsaConfig ScenarioRsa(Sim sim, double w_informativity = 11.0, double w_cost = 7.0);
PriorSpec ScenarioPrior(Sim sim, double bias = 0.3);

std::vector<TrialRecord> run_sim1(const FitConfig& fit_cfg, const PriorSpec& prior,
                                  const RsaConfig& rsa_cfg, PoolingRegime regime, int n_runs,
                                  std::uint64_t seed, const ScenarioOptions& options = {});

std::vector<TrialRecord> run_sim2(const FitConfig& fit_cfg, const PriorSpec& prior,
                                  const RsaConfig& rsa_cfg, PoolingRegime regime, int n_runs,
                                  std::uint64_t seed, const ScenarioOptions& options = {});

SimResult run_sim3(const FitConfig& fit_cfg, const PriorSpec& prior, const RsaConfig& rsa_cfg,
                   PoolingRegime regime, int n_networks, std::uint64_t seed,
                   const ScenarioOptions& options = {});

// Alignment of every agent pair at the current beliefs: within-pairs are the
// scheduled pairs of `block` (0-based).
std::vector<AlignmentRecord> MeasureAlignment(std::vector<AgentState>& agents,
                                              const Schedule& schedule, int block,
                                              AlignmentMode mode, std::mt19937_64& rng);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
// rethrown on the calling thread (the first one by index).
void ParallelFor(int n, int workers, const std::function<void(int)>& fn);

}  // namespace convention

#endif  // CONVENTION_NETWORK_SIM_H_
