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

#include "convention/agents.h"

#include <utility>
#include <vector>

namespace convention {

namespace {

// Stream tags for seeds derived from the agent seed.
constexpr std::uint64_t kFitStream = 1;
constexpr std::uint64_t kPredictiveStream = 2;
constexpr std::uint64_t kChoiceStream = 3;

template <typename D>
std::size_t Sample(const D& dist, std::mt19937_64& rng) {
  std::discrete_distribution<std::size_t> pick(dist.probs.begin(), dist.probs.end());
  return pick(rng);
}

}  // namespace

AgentState::AgentState(int agent_id, AgentConfig config, std::uint64_t run_seed)
    : agent_id_(agent_id),
      config_(std::move(config)),
      seed_(DeriveSeed(run_seed, static_cast<std::uint64_t>(agent_id))),
      rng_(DeriveSeed(seed_, kChoiceStream)) {
  config_.rsa.Validate();
  config_.prior.Validate(config_.rsa.vocab);
  config_.fit.Validate();
  guide_ = GaussianGuide::FromPrior(config_.prior, config_.regime, {});
}

const PredictiveTables& AgentState::Predictive(int partner_id) {
  auto it = predictive_cache_.find(partner_id);
  if (it == predictive_cache_.end()) {
    const auto seed = DeriveSeed(seed_, kPredictiveStream, num_observations_,
                                 static_cast<std::uint64_t>(partner_id));
    it = predictive_cache_
             .emplace(partner_id, predictive_tables(guide_, config_.rsa, config_.prior,
                                                    config_.regime, partner_id,
                                                    config_.fit.n_mc_predictive, seed))
             .first;
  }
  return it->second;
}

Utterance AgentState::Speak(ObjectId target, int partner_id) {
  config_.rsa.vocab.CheckObject(target);
  const auto dist = Predictive(partner_id).Speaker(target);
  return dist.support[Sample(dist, rng_)];
}

ObjectId AgentState::Listen(const Utterance& u, int partner_id) {
  const auto dist = Predictive(partner_id).Listener(u);
  return dist.support[Sample(dist, rng_)];
}

void AgentState::Observe(int partner_id, const Utterance& u, ObjectId o,
                         PartnerRole partner_role) {
  const auto& vocab = config_.rsa.vocab;
  vocab.CheckObject(o);
  if (!vocab.Contains(u)) throw ConventionError("utterance " + u.ToString() + " not in vocabulary");

  auto [it, inserted] = logs_.try_emplace(partner_id, partner_id);
  it->second.Append({num_observations_, u, o, partner_role});
  ++num_observations_;
  guide_.AddPartner(config_.prior, config_.regime, partner_id);

  // Refit from the prior-initialized guide on all accumulated data.
  std::vector<int> partners;
  std::vector<ObservationLog> data;
  for (const auto& [id, log] : logs_) {
    partners.push_back(id);
    data.push_back(log);
  }
  FitConfig fit_cfg = config_.fit;
  fit_cfg.seed = DeriveSeed(seed_, kFitStream, num_observations_);
  const auto start = GaussianGuide::FromPrior(config_.prior, config_.regime, partners);
  guide_ = fit(start, data, config_.prior, config_.rsa, config_.regime, fit_cfg);
  predictive_cache_.clear();
}

Utterance ScriptedAgent::Speak(ObjectId target) const {
  if (behavior_ != ScriptedBehavior::kAlwaysU1ForO1) {
    throw ConventionError("scripted agent cannot speak");
  }
  return Utterance::Primitive(target.index);
}

ObjectId ScriptedAgent::Listen(const Utterance&, ObjectId true_target) const {
  if (behavior_ != ScriptedBehavior::kOracleListener) {
    throw ConventionError("scripted agent cannot listen");
  }
  return true_target;
}

}  // namespace convention
