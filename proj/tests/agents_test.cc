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

#include "convention/agents.h"

using namespace convention;

namespace {

AgentConfig ListenerConfig(PoolingRegime regime) {
  AgentConfig config;
  config.rsa.vocab = Vocabulary(2, 2, false);
  config.prior = PriorSpec::Symmetric(config.rsa.vocab);
  config.regime = regime;
  return config;
}

const Utterance kU1 = Utterance::Primitive(0);
const ObjectId kO1{0};

}  // namespace

TEST_CASE("scripted speaker names o1 with u1 every time") {
  const ScriptedAgent speaker(7, ScriptedBehavior::kAlwaysU1ForO1);
  for (int i = 0; i < 10; ++i) CHECK(speaker.Speak(kO1) == kU1);
  CHECK(speaker.Speak(ObjectId{1}) == Utterance::Primitive(1));
  CHECK_THROWS_AS(speaker.Listen(kU1, kO1), ConventionError);
}

TEST_CASE("oracle listener returns the true target") {
  const ScriptedAgent listener(3, ScriptedBehavior::kOracleListener);
  CHECK(listener.Listen(Utterance::Conjunction(0, 1), ObjectId{1}) == ObjectId{1});
  CHECK(listener.Listen(kU1, kO1) == kO1);
  CHECK_THROWS_AS(listener.Speak(kO1), ConventionError);
}

TEST_CASE("fresh agent is at chance") {
  AgentState agent(0, ListenerConfig(PoolingRegime::kPartial), 11);
  CHECK(agent.num_observations() == 0);
  CHECK(agent.Predictive(1).Listener(kU1).prob(kO1) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("four consistent trials make the listener confident") {
  AgentState agent(0, ListenerConfig(PoolingRegime::kPartial), 11);
  for (int t = 0; t < 4; ++t) agent.Observe(1, kU1, kO1, PartnerRole::kSpeaker);
  CHECK(agent.num_observations() == 4);
  CHECK(agent.logs().at(1).records().size() == 4);
  const double same_partner = agent.Predictive(1).Listener(kU1).prob(kO1);
  CHECK(same_partner > 0.75);

  SUBCASE("a new partner reverts toward chance") {
    const double new_partner = agent.Predictive(2).Listener(kU1).prob(kO1);
    CHECK(new_partner < same_partner);
    agent.Observe(2, Utterance::Primitive(1), kO1, PartnerRole::kSpeaker);
    CHECK(agent.guide().phi.size() == 2);
    CHECK(agent.Predictive(2).Listener(kU1).prob(kO1) < same_partner);
  }
}

TEST_CASE("complete pooling keeps a single lexicon block") {
  AgentState agent(0, ListenerConfig(PoolingRegime::kComplete), 11);
  agent.Observe(1, kU1, kO1, PartnerRole::kSpeaker);
  agent.Observe(2, kU1, kO1, PartnerRole::kSpeaker);
  CHECK(!agent.guide().theta.has_value());
  CHECK(agent.guide().phi.size() == 1);
  CHECK(agent.guide().phi.count(kPooledPartner) == 1);
}

TEST_CASE("agents with the same seed behave identically") {
  AgentState a(2, ListenerConfig(PoolingRegime::kPartial), 99);
  AgentState b(2, ListenerConfig(PoolingRegime::kPartial), 99);
  a.Observe(1, kU1, kO1, PartnerRole::kSpeaker);
  b.Observe(1, kU1, kO1, PartnerRole::kSpeaker);
  CHECK(a.guide() == b.guide());
  for (int i = 0; i < 20; ++i) {
    CHECK(a.Listen(kU1, 1) == b.Listen(kU1, 1));
    CHECK(a.Speak(kO1, 1) == b.Speak(kO1, 1));
  }
}

TEST_CASE("agent ids give different random streams") {
  AgentState a(1, ListenerConfig(PoolingRegime::kPartial), 99);
  AgentState b(2, ListenerConfig(PoolingRegime::kPartial), 99);
  int differ = 0;
  for (int i = 0; i < 64; ++i) differ += a.Listen(kU1, 1) != b.Listen(kU1, 1);
  CHECK(differ > 0);
}

TEST_CASE("speaking and listening leave beliefs alone") {
  AgentState agent(0, ListenerConfig(PoolingRegime::kNone), 5);
  agent.Observe(1, kU1, kO1, PartnerRole::kSpeaker);
  const auto before = agent.guide();
  const double p = agent.Predictive(1).Listener(kU1).prob(kO1);
  for (int i = 0; i < 10; ++i) {
    agent.Speak(kO1, 1);
    agent.Listen(kU1, 1);
  }
  CHECK(agent.guide() == before);
  CHECK(agent.Predictive(1).Listener(kU1).prob(kO1) == p);
}

TEST_CASE("observe rejects foreign objects and utterances") {
  AgentState agent(0, ListenerConfig(PoolingRegime::kPartial), 5);
  CHECK_THROWS_AS(agent.Observe(1, kU1, ObjectId{2}, PartnerRole::kSpeaker), ConventionError);
  CHECK_THROWS_AS(agent.Observe(1, Utterance::Conjunction(0, 1), kO1, PartnerRole::kSpeaker),
                  ConventionError);
  CHECK(agent.num_observations() == 0);
  CHECK_THROWS_AS(agent.Speak(ObjectId{5}, 1), ConventionError);
}

TEST_CASE("listener role data teaches the speaker") {
  AgentConfig config;
  config.rsa.vocab = Vocabulary(2, 2, false);
  config.prior = PriorSpec::Symmetric(config.rsa.vocab);
  AgentState speaker(0, config, 3);
  for (int t = 0; t < 4; ++t) speaker.Observe(1, kU1, kO1, PartnerRole::kListener);
  const auto dist = speaker.Predictive(1).Speaker(kO1);
  CHECK(dist.prob(kU1) > 0.75);
}
