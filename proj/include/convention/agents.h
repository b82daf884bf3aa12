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

#ifndef CONVENTION_AGENTS_H_
#define CONVENTION_AGENTS_H_

#include <cstdint>
#include <map>
#include <random>

#include "convention/inference.h"

namespace convention {

struct AgentConfig {
  RsaConfig rsa;
  PriorSpec prior;
  FitConfig fit;
  PoolingRegime regime = PoolingRegime::kPartial;
};

// A learning agent: holds per-partner observation logs and a variational
// guide refit on everything seen so far. Observe() is the only call that
// changes beliefs; Speak() and Listen() only advance the agent's own random
// stream.
class AgentState {
 public:
  // run_seed and agent_id determine every random choice the agent makes.
  AgentState(int agent_id, AgentConfig config, std::uint64_t run_seed);

  int agent_id() const { return agent_id_; }
  PoolingRegime regime() const { return config_.regime; }
  const AgentConfig& config() const { return config_; }
  const GaussianGuide& guide() const { return guide_; }
  const std::map<int, ObservationLog>& logs() const { return logs_; }
  int num_observations() const { return num_observations_; }

  // Predictives toward partner_id under the current beliefs. Cached until the
  // next Observe().
  const PredictiveTables& Predictive(int partner_id);

  // Samples an utterance for target from the speaker predictive.
  Utterance Speak(ObjectId target, int partner_id);
  // Samples an object for u from the listener predictive.
  ObjectId Listen(const Utterance& u, int partner_id);

  // Records the partner's action on a trial and refits the guide on all data.
  void Observe(int partner_id, const Utterance& u, ObjectId o, PartnerRole partner_role);

  std::mt19937_64& rng() { return rng_; }

 private:
  int agent_id_;
  AgentConfig config_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  GaussianGuide guide_;
  std::map<int, ObservationLog> logs_;
  int num_observations_ = 0;
  std::map<int, PredictiveTables> predictive_cache_;
};

enum class ScriptedBehavior {
  // Speaker that names object i with primitive i, every time.
  kAlwaysU1ForO1,
  // Listener that always picks the true target.
  kOracleListener,
};

class ScriptedAgent {
 public:
  ScriptedAgent(int agent_id, ScriptedBehavior behavior)
      : agent_id_(agent_id), behavior_(behavior) {}

  int agent_id() const { return agent_id_; }
  ScriptedBehavior behavior() const { return behavior_; }

  Utterance Speak(ObjectId target) const;
  // The harness passes the true target on a side channel.
  ObjectId Listen(const Utterance& u, ObjectId true_target) const;

 private:
  int agent_id_;
  ScriptedBehavior behavior_;
};

}  // namespace convention

#endif  // CONVENTION_AGENTS_H_
