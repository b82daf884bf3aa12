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

#ifndef CONVENTION_RSA_H_
#define CONVENTION_RSA_H_

#include <span>
#include <vector>

#include "convention/lexicon.h"

namespace convention {

// Floor applied to log-probabilities so that likelihoods and their gradients
// stay finite.
inline constexpr double kLogProbFloor = -1e9;

struct RsaConfig {
  Vocabulary vocab;
  double w_informativity = 11.0;
  double w_cost = 7.0;
  // Empty means uniform over vocab.n_objects().
  std::vector<double> object_prior;

  // Throws ConventionError on a malformed prior or non-finite weights.
  void Validate() const;
  double ObjectPrior(int object) const;
};

template <typename Support>
struct Distribution {
  std::vector<Support> support;
  std::vector<double> probs;

  double prob(const Support& s) const {
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (support[i] == s) return probs[i];
    }
    return 0.0;
  }
  // Index of the first most probable element.
  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    return best;
  }
};

using ObjectDistribution = Distribution<ObjectId>;
using UtteranceDistribution = Distribution<Utterance>;

// L0(o|u) proportional to exp(meaning(u, o)).
ObjectDistribution literal_listener(const LexiconMatrix& phi, const Utterance& u);

// S1(u|o) proportional to exp(w_I log L0(o|u) - w_C cost(u)), over cfg.vocab.
UtteranceDistribution pragmatic_speaker(const LexiconMatrix& phi, ObjectId o,
                                        const RsaConfig& cfg);

// L1(o|u) proportional to S1(u|o) P(o).
ObjectDistribution pragmatic_listener(const LexiconMatrix& phi, const Utterance& u,
                                      const RsaConfig& cfg);

// log S1(u|o) for a record where the partner spoke, log L1(o|u) where the
// partner listened. Floored at kLogProbFloor.
double datum_log_likelihood(const LexiconMatrix& phi, const ObservationRecord& record,
                            const RsaConfig& cfg);

// Full L0/S1/L1 tables for one lexicon, with a reverse-mode pass for
// likelihood gradients. Buffers are reused across Compute() calls, so one
// instance per thread.
class RsaTables {
 public:
  explicit RsaTables(const RsaConfig& cfg);

  const RsaConfig& config() const { return cfg_; }
  int n_objects() const { return n_objects_; }
  int n_utterances() const { return n_utterances_; }

  // phi is object-major, n_objects x n_primitives.
  void Compute(std::span<const double> phi);

  // Unfloored log-probabilities of the last Compute().
  double log_l0(int u, int o) const { return log_l0_[u * n_objects_ + o]; }
  double log_s1(int o, int u) const { return log_s1_[o * n_utterances_ + u]; }
  double log_l1(int u, int o) const { return log_l1_[u * n_objects_ + o]; }

  // Sum of weight * floored log-probability, where speaker_weights is indexed
  // [o][u] (log S1(u|o)) and listener_weights [u][o] (log L1(o|u)).
  double WeightedLogLikelihood(std::span<const double> speaker_weights,
                               std::span<const double> listener_weights) const;

  // Adds the gradient of WeightedLogLikelihood with respect to phi into grad.
  void Backward(std::span<const double> speaker_weights,
                std::span<const double> listener_weights, std::span<double> grad);

 private:
  RsaConfig cfg_;
  int n_objects_;
  int n_primitives_;
  int n_utterances_;
  std::vector<double> costs_;
  std::vector<double> log_prior_;
  std::vector<double> phi_;
  std::vector<double> meaning_;  // [u][o]
  std::vector<double> log_l0_;   // [u][o]
  std::vector<double> log_s1_;   // [o][u]
  std::vector<double> log_l1_;   // [u][o]
  // Scratch adjoints.
  std::vector<double> d_log_s1_;
  std::vector<double> d_log_l0_;
};

}  // namespace convention

#endif  // CONVENTION_RSA_H_
