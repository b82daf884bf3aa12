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

#include "convention/rsa.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace convention {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Replaces x[i] (stride apart) with x[i] - logsumexp(x). Entries at -inf stay
// at -inf. Returns false when every entry is -inf.
bool LogNormalize(double* x, int n, int stride) {
  double hi = kNegInf;
  for (int i = 0; i < n; ++i) hi = std::max(hi, x[i * stride]);
  if (hi == kNegInf) return false;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += std::exp(x[i * stride] - hi);
  const double lse = hi + std::log(total);
  for (int i = 0; i < n; ++i) x[i * stride] -= lse;
  return true;
}

// Backward pass of LogNormalize: given adjoints dy of y = x - lse(x) and the
// normalized log-probabilities y, writes dx into dy in place.
void LogNormalizeBackward(const double* y, double* dy, int n, int stride) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += dy[i * stride];
  if (total == 0.0) return;
  for (int i = 0; i < n; ++i) dy[i * stride] -= std::exp(y[i * stride]) * total;
}

double Floored(double log_p) { return std::max(log_p, kLogProbFloor); }

}  // namespace

void RsaConfig::Validate() const {
  if (!std::isfinite(w_informativity) || !std::isfinite(w_cost)) {
    throw ConventionError("RSA weights must be finite");
  }
  if (object_prior.empty()) return;
  if (static_cast<int>(object_prior.size()) != vocab.n_objects()) {
    throw ConventionError("object prior length does not match number of objects");
  }
  double total = 0.0;
  for (double p : object_prior) {
    if (!(p >= 0.0)) throw ConventionError("object prior entries must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConventionError("object prior must sum to 1");
}

double RsaConfig::ObjectPrior(int object) const {
  if (object_prior.empty()) return 1.0 / vocab.n_objects();
  return object_prior[object];
}

ObjectDistribution literal_listener(const LexiconMatrix& phi, const Utterance& u) {
  ObjectDistribution dist;
  std::vector<double> logits;
  for (int o = 0; o < phi.n_objects(); ++o) {
    dist.support.push_back(ObjectId{o});
    logits.push_back(meaning_value(phi, u, ObjectId{o}));
  }
  LogNormalize(logits.data(), phi.n_objects(), 1);
  for (double l : logits) dist.probs.push_back(std::exp(l));
  return dist;
}

UtteranceDistribution pragmatic_speaker(const LexiconMatrix& phi, ObjectId o,
                                        const RsaConfig& cfg) {
  if (!phi.Matches(cfg.vocab)) throw ConventionError("lexicon shape does not match vocabulary");
  cfg.vocab.CheckObject(o);
  RsaTables tables(cfg);
  tables.Compute(phi.values());
  UtteranceDistribution dist;
  dist.support = cfg.vocab.utterances();
  for (int u = 0; u < tables.n_utterances(); ++u) {
    dist.probs.push_back(std::exp(tables.log_s1(o.index, u)));
  }
  return dist;
}

ObjectDistribution pragmatic_listener(const LexiconMatrix& phi, const Utterance& u,
                                      const RsaConfig& cfg) {
  if (!phi.Matches(cfg.vocab)) throw ConventionError("lexicon shape does not match vocabulary");
  const int ui = cfg.vocab.IndexOf(u);
  RsaTables tables(cfg);
  tables.Compute(phi.values());
  ObjectDistribution dist;
  for (int o = 0; o < tables.n_objects(); ++o) {
    dist.support.push_back(ObjectId{o});
    dist.probs.push_back(std::exp(tables.log_l1(ui, o)));
  }
  return dist;
}

double datum_log_likelihood(const LexiconMatrix& phi, const ObservationRecord& record,
                            const RsaConfig& cfg) {
  if (!phi.Matches(cfg.vocab)) throw ConventionError("lexicon shape does not match vocabulary");
  cfg.vocab.CheckObject(record.object);
  const int ui = cfg.vocab.IndexOf(record.utterance);
  RsaTables tables(cfg);
  tables.Compute(phi.values());
  if (record.partner_role == PartnerRole::kSpeaker) {
    return Floored(tables.log_s1(record.object.index, ui));
  }
  return Floored(tables.log_l1(ui, record.object.index));
}

RsaTables::RsaTables(const RsaConfig& cfg)
    : cfg_(cfg),
      n_objects_(cfg.vocab.n_objects()),
      n_primitives_(cfg.vocab.n_primitives()),
      n_utterances_(cfg.vocab.n_utterances()) {
  cfg_.Validate();
  for (const auto& u : cfg_.vocab.utterances()) costs_.push_back(utterance_cost(u));
  for (int o = 0; o < n_objects_; ++o) {
    const double p = cfg_.ObjectPrior(o);
    log_prior_.push_back(p > 0.0 ? std::log(p) : kNegInf);
  }
  const std::size_t cells = static_cast<std::size_t>(n_utterances_) * n_objects_;
  meaning_.resize(cells);
  log_l0_.resize(cells);
  log_s1_.resize(cells);
  log_l1_.resize(cells);
  d_log_s1_.resize(cells);
  d_log_l0_.resize(cells);
}

void RsaTables::Compute(std::span<const double> phi) {
  if (phi.size() != static_cast<std::size_t>(n_objects_) * n_primitives_) {
    throw ConventionError("lexicon values do not match vocabulary shape");
  }
  phi_.assign(phi.begin(), phi.end());
  const auto& utterances = cfg_.vocab.utterances();
  for (int u = 0; u < n_utterances_; ++u) {
    for (int o = 0; o < n_objects_; ++o) {
      const double m = meaning_value(phi_, n_primitives_, utterances[u], ObjectId{o});
      if (!std::isfinite(m)) {
        throw ConventionError("non-finite meaning for " + utterances[u].ToString() +
                              " on object " + std::to_string(o));
      }
      meaning_[u * n_objects_ + o] = m;
    }
  }

  // L0: normalize each utterance row over objects.
  std::copy(meaning_.begin(), meaning_.end(), log_l0_.begin());
  for (int u = 0; u < n_utterances_; ++u) LogNormalize(&log_l0_[u * n_objects_], n_objects_, 1);

  // S1: normalize each object row over utterances.
  const double w_i = cfg_.w_informativity;
  const double w_c = cfg_.w_cost;
  for (int o = 0; o < n_objects_; ++o) {
    double* row = &log_s1_[o * n_utterances_];
    for (int u = 0; u < n_utterances_; ++u) {
      row[u] = w_i * Floored(log_l0_[u * n_objects_ + o]) - w_c * costs_[u];
    }
    LogNormalize(row, n_utterances_, 1);
  }

  // L1: normalize S1(u|o) P(o) over objects.
  for (int u = 0; u < n_utterances_; ++u) {
    double* row = &log_l1_[u * n_objects_];
    for (int o = 0; o < n_objects_; ++o) row[o] = log_s1_[o * n_utterances_ + u] + log_prior_[o];
    if (!LogNormalize(row, n_objects_, 1)) {
      throw ConventionError("pragmatic listener has zero mass for " + utterances[u].ToString());
    }
  }
}

double RsaTables::WeightedLogLikelihood(std::span<const double> speaker_weights,
                                        std::span<const double> listener_weights) const {
  double total = 0.0;
  for (std::size_t i = 0; i < speaker_weights.size(); ++i) {
    if (speaker_weights[i] != 0.0) total += speaker_weights[i] * Floored(log_s1_[i]);
  }
  for (std::size_t i = 0; i < listener_weights.size(); ++i) {
    if (listener_weights[i] != 0.0) total += listener_weights[i] * Floored(log_l1_[i]);
  }
  return total;
}

void RsaTables::Backward(std::span<const double> speaker_weights,
                         std::span<const double> listener_weights, std::span<double> grad) {
  const std::size_t cells = static_cast<std::size_t>(n_utterances_) * n_objects_;
  // Adjoint of log S1, [o][u].
  for (std::size_t i = 0; i < cells; ++i) {
    d_log_s1_[i] = (speaker_weights.empty() || log_s1_[i] < kLogProbFloor) ? 0.0
                                                                         : speaker_weights[i];
  }
  if (!listener_weights.empty()) {
    std::vector<double> d_row(n_objects_);
    for (int u = 0; u < n_utterances_; ++u) {
      bool any = false;
      for (int o = 0; o < n_objects_; ++o) {
        const double lp = log_l1_[u * n_objects_ + o];
        d_row[o] = lp < kLogProbFloor ? 0.0 : listener_weights[u * n_objects_ + o];
        any = any || d_row[o] != 0.0;
      }
      if (!any) continue;
      LogNormalizeBackward(&log_l1_[u * n_objects_], d_row.data(), n_objects_, 1);
      for (int o = 0; o < n_objects_; ++o) {
        if (log_prior_[o] != kNegInf) d_log_s1_[o * n_utterances_ + u] += d_row[o];
      }
    }
  }

  // Through the S1 normalization into log L0.
  const double w_i = cfg_.w_informativity;
  for (int o = 0; o < n_objects_; ++o) {
    LogNormalizeBackward(&log_s1_[o * n_utterances_], &d_log_s1_[o * n_utterances_],
                         n_utterances_, 1);
    for (int u = 0; u < n_utterances_; ++u) {
      const double l0 = log_l0_[u * n_objects_ + o];
      d_log_l0_[u * n_objects_ + o] =
          l0 < kLogProbFloor ? 0.0 : w_i * d_log_s1_[o * n_utterances_ + u];
    }
  }

  // Through the L0 normalization into meanings, then into phi.
  const auto& utterances = cfg_.vocab.utterances();
  for (int u = 0; u < n_utterances_; ++u) {
    double* d_meaning = &d_log_l0_[u * n_objects_];
    LogNormalizeBackward(&log_l0_[u * n_objects_], d_meaning, n_objects_, 1);
    const Utterance& utt = utterances[u];
    for (int o = 0; o < n_objects_; ++o) {
      const double dm = d_meaning[o];
      if (dm == 0.0) continue;
      const int row = o * n_primitives_;
      if (!utt.is_conjunction()) {
        grad[row + utt.primitive(0)] += dm;
      } else {
        const int a = row + utt.primitive(0);
        const int b = row + utt.primitive(1);
        const auto g = conjunction_gradient(phi_[a], phi_[b]);
        grad[a] += dm * g[0];
        grad[b] += dm * g[1];
      }
    }
  }
}

}  // namespace convention
