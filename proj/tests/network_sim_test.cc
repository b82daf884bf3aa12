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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <set>
#include <stdexcept>
#include <utility>

#include "convention/network_sim.h"

using namespace convention;

namespace {

FitConfig Quick() {
  FitConfig fit_cfg;
  fit_cfg.n_steps = 60;
  fit_cfg.n_mc_predictive = 256;
  return fit_cfg;
}

bool SameTrials(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].trial != b[i].trial || a[i].run_id != b[i].run_id || a[i].target != b[i].target ||
        !(a[i].utterance == b[i].utterance) || a[i].choice != b[i].choice ||
        a[i].listener_target_prob != b[i].listener_target_prob ||
        a[i].expected_utterance_length != b[i].expected_utterance_length) {
      return false;
    }
  }
  return true;
}

// Brute-force schedule check: each agent once per block, each pair once.
void CheckRoundRobin(int n) {
  const Schedule s = round_robin(n);
  REQUIRE(static_cast<int>(s.blocks.size()) == n - 1);
  std::set<std::pair<int, int>> met;
  for (const auto& block : s.blocks) {
    CHECK(static_cast<int>(block.size()) == n / 2);
    std::multiset<int> seen;
    for (const auto& p : block) {
      CHECK(p.a < p.b);
      seen.insert(p.a);
      seen.insert(p.b);
      CHECK(met.insert({p.a, p.b}).second);
    }
    for (int agent = 0; agent < n; ++agent) CHECK(seen.count(agent) == 1);
  }
  CHECK(static_cast<int>(met.size()) == n * (n - 1) / 2);
}

}  // namespace

TEST_CASE("round robin covers every pair once") {
  CheckRoundRobin(2);
  CheckRoundRobin(4);
  CheckRoundRobin(6);
  CheckRoundRobin(10);
}

TEST_CASE("round robin for four agents") {
  const Schedule s = round_robin(4);
  REQUIRE(s.blocks.size() == 3);
  CHECK(s.blocks[0] == std::vector<Pairing>{{0, 1}, {2, 3}});
  CHECK(s.blocks[1] == std::vector<Pairing>{{0, 2}, {1, 3}});
  CHECK(s.blocks[2] == std::vector<Pairing>{{0, 3}, {1, 2}});
  CHECK(s.PartnerOf(1, 3) == 1);
  CHECK(s.Paired(2, 2, 1));
  CHECK(!s.Paired(2, 0, 1));
  CHECK(s.trials_per_block == 8);
}

TEST_CASE("round robin rejects odd or tiny networks") {
  CHECK_THROWS_AS(round_robin(3), ConventionError);
  CHECK_THROWS_AS(round_robin(0), ConventionError);
  CHECK_THROWS_AS(round_robin(4, 0), ConventionError);
}

TEST_CASE("sim names round trip") {
  for (Sim sim : {Sim::kSim1, Sim::kSim2, Sim::kSim3}) CHECK(ParseSim(SimName(sim)) == sim);
  CHECK_THROWS_AS(ParseSim("sim4"), ConventionError);
}

TEST_CASE("sim1 trial structure") {
  const auto recs = run_sim1(Quick(), ScenarioPrior(Sim::kSim1), ScenarioRsa(Sim::kSim1),
                             PoolingRegime::kPartial, 2, 4);
  REQUIRE(recs.size() == 32);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    CHECK(r.run_id == static_cast<int>(i / 16));
    CHECK(r.trial == static_cast<int>(i % 16) + 1);
    CHECK(r.block == (r.trial - 1) / 4 + 1);
    CHECK(r.partner_index == r.block);
    CHECK(r.speaker_id == r.partner_index);
    CHECK(r.listener_id == 0);
    CHECK(r.target == ObjectId{0});
    CHECK(r.utterance == Utterance::Primitive(0));
    CHECK(r.utterance_length == 1.0);
    CHECK(r.listener_target_prob >= 0.0);
    CHECK(r.listener_target_prob <= 1.0);
  }
}

TEST_CASE("sim1 rejects the wrong vocabulary") {
  CHECK_THROWS_AS(run_sim1(Quick(), ScenarioPrior(Sim::kSim2), ScenarioRsa(Sim::kSim2),
                           PoolingRegime::kPartial, 2, 4),
                  ConventionError);
}

TEST_CASE("sim1 trial 1 agrees across regimes") {
  double first[3];
  int i = 0;
  for (auto regime : {PoolingRegime::kPartial, PoolingRegime::kComplete, PoolingRegime::kNone}) {
    const auto recs = run_sim1(Quick(), ScenarioPrior(Sim::kSim1), ScenarioRsa(Sim::kSim1), regime,
                               4, 8, {.n_partners = 1, .trials_per_partner = 1});
    double mean = 0.0;
    for (const auto& r : recs) mean += r.listener_target_prob / recs.size();
    first[i++] = mean;
  }
  CHECK(std::abs(first[0] - first[1]) < 0.03);
  CHECK(std::abs(first[0] - first[2]) < 0.03);
}

TEST_CASE("sim2 trial structure") {
  const auto recs = run_sim2(Quick(), ScenarioPrior(Sim::kSim2), ScenarioRsa(Sim::kSim2),
                             PoolingRegime::kNone, 2, 4);
  REQUIRE(recs.size() == 24);
  std::set<int> targets;
  for (const auto& r : recs) {
    CHECK(r.speaker_id == 0);
    CHECK(r.listener_id == r.partner_index);
    CHECK(r.choice == r.target);
    CHECK(r.listener_target_prob == 1.0);
    CHECK(r.utterance_length == utterance_cost(r.utterance));
    CHECK(r.expected_utterance_length >= 1.0);
    CHECK(r.expected_utterance_length <= 2.0);
    targets.insert(r.target.index);
  }
  CHECK(targets.size() == 2);
}

TEST_CASE("sim3 trial and alignment structure") {
  const auto result = run_sim3(Quick(), ScenarioPrior(Sim::kSim3), ScenarioRsa(Sim::kSim3),
                               PoolingRegime::kPartial, 2, 4);
  const Schedule schedule = round_robin(4);
  REQUIRE(result.trials.size() == 2 * 3 * 8 * 2);
  for (const auto& r : result.trials) {
    const auto& block = schedule.blocks[r.block - 1];
    CHECK(schedule.Paired(r.block - 1, r.speaker_id, r.listener_id));
    // Roles alternate: the lower id speaks on odd trials within the block.
    const int within = (r.trial - 1) % 8;
    const bool lower_speaks = r.speaker_id < r.listener_id;
    CHECK(lower_speaks == (within % 2 == 0));
    CHECK(block.size() == 2);
  }
  // 3 blocks x 6 pairs x 2 targets per network.
  REQUIRE(result.alignment.size() == 2 * 36);
  int within = 0;
  for (const auto& a : result.alignment) {
    CHECK((a.pair_type == PairType::kWithin) == schedule.Paired(a.block - 1, a.agent_a, a.agent_b));
    within += a.pair_type == PairType::kWithin;
  }
  CHECK(within == 2 * 3 * 2 * 2);
}

TEST_CASE("simulations are deterministic and independent of workers") {
  const auto a = run_sim1(Quick(), ScenarioPrior(Sim::kSim1), ScenarioRsa(Sim::kSim1),
                          PoolingRegime::kPartial, 3, 21);
  const auto b = run_sim1(Quick(), ScenarioPrior(Sim::kSim1), ScenarioRsa(Sim::kSim1),
                          PoolingRegime::kPartial, 3, 21, {.workers = 3});
  CHECK(SameTrials(a, b));
  const auto c = run_sim1(Quick(), ScenarioPrior(Sim::kSim1), ScenarioRsa(Sim::kSim1),
                          PoolingRegime::kPartial, 3, 22);
  CHECK(!SameTrials(a, c));

  const auto s1 = run_sim3(Quick(), ScenarioPrior(Sim::kSim3), ScenarioRsa(Sim::kSim3),
                           PoolingRegime::kNone, 2, 5, {.trials_per_pair = 2});
  const auto s2 = run_sim3(Quick(), ScenarioPrior(Sim::kSim3), ScenarioRsa(Sim::kSim3),
                           PoolingRegime::kNone, 2, 5, {.trials_per_pair = 2, .workers = 2});
  CHECK(SameTrials(s1.trials, s2.trials));
}

TEST_CASE("parallel for runs every index and rethrows") {
  std::atomic<int> sum{0};
  ParallelFor(100, 4, [&](int i) { sum += i; });
  CHECK(sum == 4950);
  CHECK_THROWS_AS(ParallelFor(10, 3,
                              [](int i) {
                                if (i == 7) throw std::runtime_error("boom");
                              }),
                  std::runtime_error);
}
