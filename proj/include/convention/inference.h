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

// Mean-field Gaussian variational inference over a community-level
// hyper-lexicon and per-partner lexicons, with Monte-Carlo posterior
// predictives for speaking and listening.

#ifndef CONVENTION_INFERENCE_H_
#define CONVENTION_INFERENCE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convention/lexicon.h"
#include "convention/rsa.h"

namespace convention {

// Raised when inference produces a non-finite quantity.
class InferenceError : public ConventionError {
 public:
  using ConventionError::ConventionError;
};

enum class PoolingRegime { kPartial, kComplete, kNone };

const char* RegimeName(PoolingRegime regime);
PoolingRegime ParseRegime(const std::string& name);

struct PriorSpec {
  HyperLexicon theta_prior_mean;
  double theta_prior_std = 1.0;
  double phi_drift_std = 1.0;

  // Marginal prior std of a partner lexicon entry under partial pooling; the
  // complete- and no-pooling baselines use it as their lexicon prior std.
  double pooled_std() const;

  void Validate(const Vocabulary& vocab) const;

  // Zero-mean prior with unit stds.
  static PriorSpec Symmetric(const Vocabulary& vocab);
  // Primitive p leans toward object (p * n_objects / n_primitives): entries
  // for that cell get +bias, everything else -bias.
  static PriorSpec Biased(const Vocabulary& vocab, double bias);
};

struct FitConfig {
  int n_steps = 2000;
  double learning_rate = 0.05;
  int n_mc_elbo = 8;
  int n_mc_predictive = 2000;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  // The returned guide is the average of the iterates over this final
  // fraction of the steps; 1/n_steps or less returns the last iterate.
  double average_fraction = 0.5;

  void Validate() const;
};

struct GaussianBlock {
  std::vector<double> mean;
  std::vector<double> log_std;
  friend bool operator==(const GaussianBlock&, const GaussianBlock&) = default;
};

// Partner id of the single shared lexicon block under complete pooling.
inline constexpr int kPooledPartner = -1;

// Independent Gaussians over every latent entry. theta is present only under
// partial pooling; phi holds one block per observed partner (partial/none)
// or the single kPooledPartner block (complete).
struct GaussianGuide {
  std::optional<GaussianBlock> theta;
  std::map<int, GaussianBlock> phi;

  // Guide equal to the regime's prior marginals for the given partners.
  static GaussianGuide FromPrior(const PriorSpec& prior, PoolingRegime regime,
                                 std::span<const int> partner_ids);

  // Adds a prior-initialized block for a newly seen partner; no-op under
  // complete pooling or when the block exists.
  void AddPartner(const PriorSpec& prior, PoolingRegime regime, int partner_id);

  std::size_t num_params() const;
  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> flat);

  friend bool operator==(const GaussianGuide&, const GaussianGuide&) = default;
};

// Same shape as the guide; holds d ELBO / d mean and d ELBO / d log_std.
using GuideGradient = GaussianGuide;

struct ElboEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// log P(theta) + sum_k log P(phi_k | theta) + sum_k log P(D_k | phi_k) for
// partial pooling; the baselines drop theta and put N(mean, pooled_std) priors
// on their lexicons. phi_all is aligned with data (partial/none) or holds the
// one shared lexicon (complete). theta is ignored outside partial pooling.
double log_joint(const HyperLexicon& theta, std::span<const LexiconMatrix> phi_all,
                 std::span<const ObservationLog> data, const PriorSpec& prior,
                 const RsaConfig& cfg, PoolingRegime regime);

ElboEstimate elbo(const GaussianGuide& guide, std::span<const ObservationLog> data,
                  const PriorSpec& prior, const RsaConfig& cfg, PoolingRegime regime, int n_mc,
                  std::uint64_t seed);

// Reparameterized gradient along the same sample path as elbo() for the
// same seed.
GuideGradient elbo_gradient(const GaussianGuide& guide, std::span<const ObservationLog> data,
                            const PriorSpec& prior, const RsaConfig& cfg, PoolingRegime regime,
                            int n_mc, std::uint64_t seed);

// Adam ascent on the ELBO starting from `guide`.
GaussianGuide fit(const GaussianGuide& guide, std::span<const ObservationLog> data,
                  const PriorSpec& prior, const RsaConfig& cfg, PoolingRegime regime,
                  const FitConfig& fit_cfg);

// Posterior predictives toward one partner, computed from a shared set of
// lexicon draws. Draws are randomized quasi-Monte-Carlo (digitally shifted
// Sobol points): w_I log L1 is heavy-tailed enough that independent draws
// leave the speaker predictive dominated by sampling noise.
struct PredictiveTables {
  Vocabulary vocab;
  std::vector<double> listener;  // [u][o]: L(o|u)
  std::vector<double> speaker;   // [o][u]: S(u|o)

  ObjectDistribution Listener(const Utterance& u) const;
  UtteranceDistribution Speaker(ObjectId o) const;
};

// Lexicon draws come from the partner's own block when the guide has one,
// from the shared block under complete pooling, from N(theta, phi_drift_std)
// with theta drawn from the guide for a novel partner under partial pooling,
// and from the prior for a novel partner under no pooling.
PredictiveTables predictive_tables(const GaussianGuide& guide, const RsaConfig& cfg,
                                   const PriorSpec& prior, PoolingRegime regime, int partner_id,
                                   int n_samples, std::uint64_t seed);

// L(o|u) proportional to E_q[S1(u|o, phi)].
ObjectDistribution predictive_listener(const GaussianGuide& guide, const Utterance& u,
                                       const RsaConfig& cfg, const PriorSpec& prior,
                                       PoolingRegime regime, int partner_id, int n_samples,
                                       std::uint64_t seed);

// S(u|o) proportional to exp(E_q[w_I log L1(o|u, phi)] - w_C cost(u)).
UtteranceDistribution predictive_speaker(const GaussianGuide& guide, ObjectId o,
                                         const RsaConfig& cfg, const PriorSpec& prior,
                                         PoolingRegime regime, int partner_id, int n_samples,
                                         std::uint64_t seed);

// Mixes a base seed with stream identifiers into an independent 64-bit seed.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0);

}  // namespace convention

#endif  // CONVENTION_INFERENCE_H_
