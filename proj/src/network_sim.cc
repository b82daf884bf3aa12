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

#include "convention/network_sim.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

namespace convention {

namespace {

constexpr std::uint64_t kTargetStream = 101;
constexpr std::uint64_t kAlignmentStream = 102;

void CheckScenario(Sim sim, const RsaConfig& rsa, const PriorSpec& prior, int n_runs) {
  const auto expected = ScenarioRsa(sim).vocab;
  if (!(rsa.vocab == expected)) {
    throw ConventionError(std::string(SimName(sim)) + " needs a " +
                          std::to_string(expected.n_objects()) + "-object, " +
                          std::to_string(expected.n_primitives()) + "-primitive vocabulary" +
                          (expected.conjunctions() ? " with conjunctions" : ""));
  }
  rsa.Validate();
  prior.Validate(rsa.vocab);
  if (n_runs < 1) throw ConventionError("need at least one run");
}

AgentConfig MakeAgentConfig(const FitConfig& fit_cfg, const PriorSpec& prior,
                            const RsaConfig& rsa_cfg, PoolingRegime regime) {
  AgentConfig config;
  config.rsa = rsa_cfg;
  config.prior = prior;
  config.fit = fit_cfg;
  config.regime = regime;
  return config;
}

int PartnerCount(Sim sim, const ScenarioOptions& options) {
  if (options.n_partners < 0 || options.trials_per_partner < 1) {
    throw ConventionError("partner cadence must be positive");
  }
  if (options.n_partners > 0) return options.n_partners;
  return sim == Sim::kSim1 ? 4 : 3;
}

double ExpectedLength(const UtteranceDistribution& dist) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    total += dist.probs[i] * utterance_cost(dist.support[i]);
  }
  return total;
}

// Prefixes inference failures with the run/trial they came from.
template <typename Fn>
void WithCoordinates(Sim sim, int run, int trial, Fn&& fn) {
  try {
    fn();
  } catch (const InferenceError& e) {
    throw InferenceError(std::string(SimName(sim)) + " run " + std::to_string(run) + " trial " +
                         std::to_string(trial) + ": " + e.what());
  }
}

}  // namespace

int Schedule::PartnerOf(int block, int agent) const {
  for (const auto& p : blocks.at(block)) {
    if (p.a == agent) return p.b;
    if (p.b == agent) return p.a;
  }
  throw ConventionError("agent " + std::to_string(agent) + " is not scheduled in block " +
                        std::to_string(block));
}

bool Schedule::Paired(int block, int x, int y) const {
  for (const auto& p : blocks.at(block)) {
    if ((p.a == x && p.b == y) || (p.a == y && p.b == x)) return true;
  }
  return false;
}

Schedule round_robin(int n_agents, int trials_per_block) {
  if (n_agents < 2 || n_agents % 2 != 0) {
    throw ConventionError("round robin needs an even number of agents, got " +
                          std::to_string(n_agents));
  }
  if (trials_per_block < 1) throw ConventionError("trials_per_block must be positive");
  std::vector<int> ring(n_agents);
  for (int i = 0; i < n_agents; ++i) ring[i] = i;
  Schedule schedule;
  schedule.trials_per_block = trials_per_block;
  for (int round = 0; round < n_agents - 1; ++round) {
    std::vector<Pairing> block;
    for (int i = 0; i < n_agents / 2; ++i) {
      const int x = ring[i];
      const int y = ring[n_agents - 1 - i];
      block.push_back({std::min(x, y), std::max(x, y)});
    }
    std::sort(block.begin(), block.end(), [](const Pairing& l, const Pairing& r) { return l.a < r.a; });
    schedule.blocks.push_back(block);
    std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
  }
  // Lead with agent 0 meeting agent 1.
  std::reverse(schedule.blocks.begin(), schedule.blocks.end());
  return schedule;
}

const char* SimName(Sim sim) {
  switch (sim) {
    case Sim::kSim1:
      return "sim1";
    case Sim::kSim2:
      return "sim2";
    case Sim::kSim3:
      return "sim3";
  }
  return "unknown";
}

Sim ParseSim(const std::string& name) {
  if (name == "sim1") return Sim::kSim1;
  if (name == "sim2") return Sim::kSim2;
  if (name == "sim3") return Sim::kSim3;
  throw ConventionError("unknown simulation '" + name + "'");
}

const char* PairTypeName(PairType type) { return type == PairType::kWithin ? "within" : "across"; }

RsaConfig ScenarioRsa(Sim sim, double w_informativity, double w_cost) {
  RsaConfig cfg;
  cfg.vocab = sim == Sim::kSim1 ? Vocabulary(2, 2, false) : Vocabulary(2, 4, true);
  cfg.w_informativity = w_informativity;
  cfg.w_cost = w_cost;
  return cfg;
}

PriorSpec ScenarioPrior(Sim sim, double bias) {
  const auto vocab = ScenarioRsa(sim).vocab;
  return sim == Sim::kSim1 ? PriorSpec::Symmetric(vocab) : PriorSpec::Biased(vocab, bias);
}

std::vector<TrialRecord> run_sim1(const FitConfig& fit_cfg, const PriorSpec& prior,
                                  const RsaConfig& rsa_cfg, PoolingRegime regime, int n_runs,
                                  std::uint64_t seed, const ScenarioOptions& options) {
  CheckScenario(Sim::kSim1, rsa_cfg, prior, n_runs);
  const auto agent_config = MakeAgentConfig(fit_cfg, prior, rsa_cfg, regime);
  const int n_partners = PartnerCount(Sim::kSim1, options);
  const int per_run = n_partners * options.trials_per_partner;
  std::vector<std::vector<TrialRecord>> runs(n_runs);
  ParallelFor(n_runs, options.workers, [&](int run) {
    AgentState learner(0, agent_config, DeriveSeed(seed, run));
    const ObjectId target{0};
    int trial = 0;
    for (int partner = 1; partner <= n_partners; ++partner) {
      const ScriptedAgent speaker(partner, ScriptedBehavior::kAlwaysU1ForO1);
      for (int t = 0; t < options.trials_per_partner; ++t) {
        ++trial;
        WithCoordinates(Sim::kSim1, run, trial, [&] {
          const Utterance u = speaker.Speak(target);
          TrialRecord rec;
          rec.run_id = run;
          rec.sim = Sim::kSim1;
          rec.regime = regime;
          rec.block = partner;
          rec.trial = trial;
          rec.partner_index = partner;
          rec.speaker_id = speaker.agent_id();
          rec.listener_id = learner.agent_id();
          rec.target = target;
          rec.utterance = u;
          rec.listener_target_prob = learner.Predictive(partner).Listener(u).prob(target);
          rec.choice = learner.Listen(u, partner);
          rec.utterance_length = utterance_cost(u);
          rec.expected_utterance_length = rec.utterance_length;
          runs[run].push_back(rec);
          learner.Observe(partner, u, target, PartnerRole::kSpeaker);
        });
      }
    }
  });
  std::vector<TrialRecord> out;
  out.reserve(static_cast<std::size_t>(n_runs) * per_run);
  for (auto& r : runs) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<TrialRecord> run_sim2(const FitConfig& fit_cfg, const PriorSpec& prior,
                                  const RsaConfig& rsa_cfg, PoolingRegime regime, int n_runs,
                                  std::uint64_t seed, const ScenarioOptions& options) {
  CheckScenario(Sim::kSim2, rsa_cfg, prior, n_runs);
  const auto agent_config = MakeAgentConfig(fit_cfg, prior, rsa_cfg, regime);
  const int n_partners = PartnerCount(Sim::kSim2, options);
  std::vector<std::vector<TrialRecord>> runs(n_runs);
  ParallelFor(n_runs, options.workers, [&](int run) {
    AgentState learner(0, agent_config, DeriveSeed(seed, run));
    std::mt19937_64 targets(DeriveSeed(seed, run, kTargetStream));
    std::uniform_int_distribution<int> pick(0, rsa_cfg.vocab.n_objects() - 1);
    int trial = 0;
    for (int partner = 1; partner <= n_partners; ++partner) {
      const ScriptedAgent listener(partner, ScriptedBehavior::kOracleListener);
      for (int t = 0; t < options.trials_per_partner; ++t) {
        ++trial;
        const ObjectId target{pick(targets)};
        WithCoordinates(Sim::kSim2, run, trial, [&] {
          TrialRecord rec;
          rec.run_id = run;
          rec.sim = Sim::kSim2;
          rec.regime = regime;
          rec.block = partner;
          rec.trial = trial;
          rec.partner_index = partner;
          rec.speaker_id = learner.agent_id();
          rec.listener_id = listener.agent_id();
          rec.target = target;
          rec.expected_utterance_length = ExpectedLength(learner.Predictive(partner).Speaker(target));
          rec.utterance = learner.Speak(target, partner);
          rec.choice = listener.Listen(rec.utterance, target);
          rec.listener_target_prob = 1.0;
          rec.utterance_length = utterance_cost(rec.utterance);
          runs[run].push_back(rec);
          learner.Observe(partner, rec.utterance, rec.choice, PartnerRole::kListener);
        });
      }
    }
  });
  std::vector<TrialRecord> out;
  for (auto& r : runs) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<AlignmentRecord> MeasureAlignment(std::vector<AgentState>& agents,
                                              const Schedule& schedule, int block,
                                              AlignmentMode mode, std::mt19937_64& rng) {
  const int n = static_cast<int>(agents.size());
  const auto& vocab = agents.front().config().rsa.vocab;
  const int n_obj = vocab.n_objects();
  const int n_prim = vocab.n_primitives();
  // label[agent][object]: the primitive the agent would use with its current
  // partner.
  std::vector<std::vector<int>> label(n, std::vector<int>(n_obj));
  for (int i = 0; i < n; ++i) {
    const auto& tables = agents[i].Predictive(schedule.PartnerOf(block, agents[i].agent_id()));
    for (int o = 0; o < n_obj; ++o) {
      const auto dist = tables.Speaker(ObjectId{o});
      std::vector<double> primitive_probs(dist.probs.begin(), dist.probs.begin() + n_prim);
      if (mode == AlignmentMode::kModal) {
        label[i][o] = static_cast<int>(
            std::max_element(primitive_probs.begin(), primitive_probs.end()) -
            primitive_probs.begin());
      } else {
        std::discrete_distribution<int> pick(primitive_probs.begin(), primitive_probs.end());
        label[i][o] = pick(rng);
      }
    }
  }
  std::vector<AlignmentRecord> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int a = agents[i].agent_id();
      const int b = agents[j].agent_id();
      for (int o = 0; o < n_obj; ++o) {
        AlignmentRecord rec;
        rec.block = block + 1;
        rec.regime = agents[i].regime();
        rec.pair_type = schedule.Paired(block, a, b) ? PairType::kWithin : PairType::kAcross;
        rec.agent_a = a;
        rec.agent_b = b;
        rec.target = ObjectId{o};
        rec.aligned = label[i][o] == label[j][o];
        out.push_back(rec);
      }
    }
  }
  return out;
}

SimResult run_sim3(const FitConfig& fit_cfg, const PriorSpec& prior, const RsaConfig& rsa_cfg,
                   PoolingRegime regime, int n_networks, std::uint64_t seed,
                   const ScenarioOptions& options) {
  CheckScenario(Sim::kSim3, rsa_cfg, prior, n_networks);
  const auto agent_config = MakeAgentConfig(fit_cfg, prior, rsa_cfg, regime);
  const Schedule schedule = round_robin(options.n_agents, options.trials_per_pair);
  std::vector<SimResult> networks(n_networks);
  ParallelFor(n_networks, options.workers, [&](int run) {
    const std::uint64_t run_seed = DeriveSeed(seed, run);
    std::vector<AgentState> agents;
    for (int id = 0; id < options.n_agents; ++id) agents.emplace_back(id, agent_config, run_seed);
    std::mt19937_64 targets(DeriveSeed(seed, run, kTargetStream));
    std::mt19937_64 alignment_rng(DeriveSeed(seed, run, kAlignmentStream));
    std::uniform_int_distribution<int> pick(0, rsa_cfg.vocab.n_objects() - 1);
    auto& result = networks[run];
    for (int block = 0; block < static_cast<int>(schedule.blocks.size()); ++block) {
      for (int t = 0; t < schedule.trials_per_block; ++t) {
        for (const auto& pair : schedule.blocks[block]) {
          const int trial = block * schedule.trials_per_block + t + 1;
          AgentState& speaker = agents[t % 2 == 0 ? pair.a : pair.b];
          AgentState& listener = agents[t % 2 == 0 ? pair.b : pair.a];
          const ObjectId target{pick(targets)};
          WithCoordinates(Sim::kSim3, run, trial, [&] {
            TrialRecord rec;
            rec.run_id = run;
            rec.sim = Sim::kSim3;
            rec.regime = regime;
            rec.block = block + 1;
            rec.trial = trial;
            rec.partner_index = block + 1;
            rec.speaker_id = speaker.agent_id();
            rec.listener_id = listener.agent_id();
            rec.target = target;
            rec.expected_utterance_length =
                ExpectedLength(speaker.Predictive(listener.agent_id()).Speaker(target));
            rec.utterance = speaker.Speak(target, listener.agent_id());
            rec.listener_target_prob =
                listener.Predictive(speaker.agent_id()).Listener(rec.utterance).prob(target);
            rec.choice = listener.Listen(rec.utterance, speaker.agent_id());
            rec.utterance_length = utterance_cost(rec.utterance);
            result.trials.push_back(rec);
            // Both sides get feedback: the listener learns what the speaker
            // said for the target, the speaker learns what the listener chose.
            listener.Observe(speaker.agent_id(), rec.utterance, target, PartnerRole::kSpeaker);
            speaker.Observe(listener.agent_id(), rec.utterance, rec.choice, PartnerRole::kListener);
          });
        }
      }
      WithCoordinates(Sim::kSim3, run, (block + 1) * schedule.trials_per_block, [&] {
        for (auto rec : MeasureAlignment(agents, schedule, block, options.alignment, alignment_rng)) {
          rec.run_id = run;
          result.alignment.push_back(rec);
        }
      });
    }
  });
  SimResult out;
  for (auto& n : networks) {
    out.trials.insert(out.trials.end(), n.trials.begin(), n.trials.end());
    out.alignment.insert(out.alignment.end(), n.alignment.begin(), n.alignment.end());
  }
  return out;
}

void ParallelFor(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace convention
