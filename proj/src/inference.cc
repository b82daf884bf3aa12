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

#include "convention/inference.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/random/sobol.hpp>

namespace convention {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double LogNormalDensity(double x, double mean, double std) {
  const double r = (x - mean) / std;
  return -0.5 * r * r - std::log(std) - kHalfLog2Pi;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Likelihood-bearing counts for one lexicon block: how often each (o, u)
// was produced by a partner speaker and each (u, o) chosen by a partner
// listener.
struct CountTable {
  int partner_id = 0;
  std::vector<double> speaker;   // [o][u]
  std::vector<double> listener;  // [u][o]
};

void AddCounts(const ObservationLog& log, const Vocabulary& vocab, CountTable& table) {
  const int n_obj = vocab.n_objects();
  const int n_utt = vocab.n_utterances();
  for (const auto& record : log.records()) {
    vocab.CheckObject(record.object);
    const int u = vocab.IndexOf(record.utterance);
    const int o = record.object.index;
    if (record.partner_role == PartnerRole::kSpeaker) {
      table.speaker[o * n_utt + u] += 1.0;
    } else {
      table.listener[u * n_obj + o] += 1.0;
    }
  }
}

// The latent-variable model for one agent's data under one regime. Parameters
// are handled as a flat vector laid out as in GaussianGuide::Flatten(): the
// theta block first (partial pooling only), then the lexicon blocks in partner
// id order, each as [means..., log_stds...].
class LatentModel {
 public:
  LatentModel(std::span<const ObservationLog> data, const PriorSpec& prior, const RsaConfig& cfg,
              PoolingRegime regime)
      : prior_(prior), regime_(regime), tables_(cfg),
        entries_(static_cast<int>(cfg.vocab.n_objects() * cfg.vocab.n_primitives())) {
    prior_.Validate(cfg.vocab);
    const std::size_t cells =
        static_cast<std::size_t>(cfg.vocab.n_objects()) * cfg.vocab.n_utterances();
    auto empty_table = [&](int id) {
      CountTable t;
      t.partner_id = id;
      t.speaker.assign(cells, 0.0);
      t.listener.assign(cells, 0.0);
      return t;
    };
    if (regime == PoolingRegime::kComplete) {
      blocks_.push_back(empty_table(kPooledPartner));
      for (const auto& log : data) AddCounts(log, cfg.vocab, blocks_.front());
    } else {
      std::map<int, CountTable> by_partner;
      for (const auto& log : data) {
        if (by_partner.contains(log.partner_id())) {
          throw ConventionError("duplicate observation log for partner " +
                                std::to_string(log.partner_id()));
        }
        auto& t = by_partner.emplace(log.partner_id(), empty_table(log.partner_id())).first->second;
        AddCounts(log, cfg.vocab, t);
      }
      for (auto& [id, t] : by_partner) blocks_.push_back(std::move(t));
    }
    has_theta_ = regime == PoolingRegime::kPartial;
    lexicon_std_ = has_theta_ ? prior_.phi_drift_std : prior_.pooled_std();
    num_latents_ = entries_ * (static_cast<int>(blocks_.size()) + (has_theta_ ? 1 : 0));
    z_.resize(num_latents_);
    eps_.resize(num_latents_);
    grad_z_.resize(num_latents_);
  }

  int num_latents() const { return num_latents_; }
  std::size_t num_params() const { return 2 * static_cast<std::size_t>(num_latents_); }

  void CheckGuide(const GaussianGuide& guide) const {
    if (guide.theta.has_value() != has_theta_) {
      throw ConventionError(std::string("guide ") + (has_theta_ ? "lacks" : "has") +
                            " a theta block under " + RegimeName(regime_) + " pooling");
    }
    if (guide.phi.size() != blocks_.size()) {
      throw ConventionError("guide has " + std::to_string(guide.phi.size()) +
                            " lexicon blocks but data needs " + std::to_string(blocks_.size()));
    }
    for (const auto& table : blocks_) {
      const auto it = guide.phi.find(table.partner_id);
      if (it == guide.phi.end()) {
        throw ConventionError("guide has no lexicon block for partner " +
                              std::to_string(table.partner_id));
      }
      if (static_cast<int>(it->second.mean.size()) != entries_ ||
          static_cast<int>(it->second.log_std.size()) != entries_) {
        throw ConventionError("guide block shape does not match vocabulary");
      }
    }
    if (has_theta_ && (static_cast<int>(guide.theta->mean.size()) != entries_ ||
                       static_cast<int>(guide.theta->log_std.size()) != entries_)) {
      throw ConventionError("guide theta shape does not match vocabulary");
    }
  }

  // Log joint at latent point z; when grad is non-empty, writes d/dz into it.
  double LogJoint(std::span<const double> z, std::span<double> grad) {
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    const auto prior_mean = prior_.theta_prior_mean.values();
    double total = 0.0;
    int offset = 0;
    std::span<const double> theta;
    if (has_theta_) {
      theta = z.subspan(0, entries_);
      const double s = prior_.theta_prior_std;
      for (int i = 0; i < entries_; ++i) {
        total += LogNormalDensity(theta[i], prior_mean[i], s);
        if (want_grad) grad[i] -= (theta[i] - prior_mean[i]) / (s * s);
      }
      offset = entries_;
    }
    const double s = lexicon_std_;
    for (const auto& table : blocks_) {
      const auto phi = z.subspan(offset, entries_);
      for (int i = 0; i < entries_; ++i) {
        const double center = has_theta_ ? theta[i] : prior_mean[i];
        total += LogNormalDensity(phi[i], center, s);
        if (want_grad) {
          const double r = (phi[i] - center) / (s * s);
          grad[offset + i] -= r;
          if (has_theta_) grad[i] += r;
        }
      }
      tables_.Compute(phi);
      total += tables_.WeightedLogLikelihood(table.speaker, table.listener);
      if (want_grad) tables_.Backward(table.speaker, table.listener, grad.subspan(offset, entries_));
      offset += entries_;
    }
    return total;
  }

  // Monte-Carlo ELBO over n_mc reparameterized draws. When grad is non-empty
  // it receives the pathwise gradient in the flat parameter layout.
  ElboEstimate Estimate(std::span<const double> params, int n_mc, std::uint64_t seed,
                        std::span<double> grad) {
    if (n_mc < 1) throw ConventionError("n_mc must be at least 1");
    const bool want_grad = !grad.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int m = 0; m < n_mc; ++m) {
      double neg_log_q = 0.0;
      for (int b = 0; b * entries_ < num_latents_; ++b) {
        const auto mean = params.subspan(2 * b * entries_, entries_);
        const auto log_std = params.subspan(2 * b * entries_ + entries_, entries_);
        for (int i = 0; i < entries_; ++i) {
          const double e = normal(rng);
          const int k = b * entries_ + i;
          eps_[k] = e;
          z_[k] = mean[i] + std::exp(log_std[i]) * e;
          neg_log_q += 0.5 * e * e + log_std[i] + kHalfLog2Pi;
        }
      }
      for (int k = 0; k < num_latents_; ++k) {
        if (!std::isfinite(z_[k])) Report(m, z_[k]);
      }
      const double value =
          LogJoint(z_, want_grad ? std::span<double>(grad_z_) : std::span<double>()) + neg_log_q;
      if (!std::isfinite(value)) Report(m, value);
      sum += value;
      sum_sq += value * value;
      if (want_grad) {
        for (int b = 0; b * entries_ < num_latents_; ++b) {
          const auto log_std = params.subspan(2 * b * entries_ + entries_, entries_);
          for (int i = 0; i < entries_; ++i) {
            const int k = b * entries_ + i;
            grad[2 * b * entries_ + i] += grad_z_[k];
            grad[2 * b * entries_ + entries_ + i] +=
                grad_z_[k] * std::exp(log_std[i]) * eps_[k] + 1.0;
          }
        }
      }
    }
    const double n = n_mc;
    if (want_grad) {
      for (double& g : grad) g /= n;
    }
    ElboEstimate out;
    out.value = sum / n;
    if (n_mc > 1) {
      const double var = std::max(0.0, (sum_sq - n * out.value * out.value) / (n - 1.0));
      out.standard_error = std::sqrt(var / n);
    }
    return out;
  }

 private:
  [[noreturn]] void Report(int sample, double value) const {
    std::ostringstream msg;
    msg << "non-finite ELBO term " << value << " at Monte-Carlo sample " << sample << "; z = [";
    for (int k = 0; k < num_latents_; ++k) msg << (k ? ", " : "") << z_[k];
    msg << "]";
    throw InferenceError(msg.str());
  }

  PriorSpec prior_;
  PoolingRegime regime_;
  RsaTables tables_;
  int entries_;
  bool has_theta_ = false;
  double lexicon_std_ = 1.0;
  int num_latents_ = 0;
  std::vector<CountTable> blocks_;
  std::vector<double> z_;
  std::vector<double> eps_;
  std::vector<double> grad_z_;
};

// Randomized quasi-Monte-Carlo standard normals: a Sobol sequence with a
// random digital shift per dimension, mapped through the normal quantile.
// Each point is marginally N(0, I); the set covers the space far more evenly
// than independent draws.
class ShiftedSobolNormals {
 public:
  ShiftedSobolNormals(int dims, std::uint64_t seed) : engine_(dims), point_(dims) {
    std::mt19937_64 rng(seed);
    for (int d = 0; d < dims; ++d) shifts_.push_back(static_cast<std::uint32_t>(rng() >> 32));
  }

  std::span<const double> Next() {
    constexpr double kScale = 1.0 / 4294967296.0;
    for (std::size_t d = 0; d < point_.size(); ++d) {
      const std::uint32_t bits = static_cast<std::uint32_t>(engine_()) ^ shifts_[d];
      const double u = (static_cast<double>(bits) + 0.5) * kScale;
      point_[d] = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
    }
    return point_;
  }

 private:
  boost::random::sobol_engine<std::uint32_t, 32> engine_;
  std::vector<std::uint32_t> shifts_;
  std::vector<double> point_;
};

GaussianBlock PriorBlock(const PriorSpec& prior, double std) {
  const auto mean = prior.theta_prior_mean.values();
  GaussianBlock block;
  block.mean.assign(mean.begin(), mean.end());
  block.log_std.assign(mean.size(), std::log(std));
  return block;
}

}  // namespace

const char* RegimeName(PoolingRegime regime) {
  switch (regime) {
    case PoolingRegime::kPartial:
      return "partial";
    case PoolingRegime::kComplete:
      return "complete";
    case PoolingRegime::kNone:
      return "none";
  }
  return "unknown";
}

PoolingRegime ParseRegime(const std::string& name) {
  if (name == "partial") return PoolingRegime::kPartial;
  if (name == "complete") return PoolingRegime::kComplete;
  if (name == "none") return PoolingRegime::kNone;
  throw ConventionError("unknown pooling regime '" + name + "'");
}

double PriorSpec::pooled_std() const {
  return std::sqrt(theta_prior_std * theta_prior_std + phi_drift_std * phi_drift_std);
}

void PriorSpec::Validate(const Vocabulary& vocab) const {
  if (!theta_prior_mean.Matches(vocab)) {
    throw ConventionError("prior mean shape does not match vocabulary");
  }
  if (!(theta_prior_std > 0.0) || !(phi_drift_std > 0.0)) {
    throw ConventionError("prior stds must be positive");
  }
  for (double v : theta_prior_mean.values()) {
    if (!std::isfinite(v)) throw ConventionError("prior mean must be finite");
  }
}

PriorSpec PriorSpec::Symmetric(const Vocabulary& vocab) {
  PriorSpec prior;
  prior.theta_prior_mean = HyperLexicon(vocab.n_objects(), vocab.n_primitives());
  return prior;
}

PriorSpec PriorSpec::Biased(const Vocabulary& vocab, double bias) {
  PriorSpec prior = Symmetric(vocab);
  for (int o = 0; o < vocab.n_objects(); ++o) {
    for (int p = 0; p < vocab.n_primitives(); ++p) {
      const int favored = p * vocab.n_objects() / vocab.n_primitives();
      prior.theta_prior_mean.at(o, p) = (favored == o) ? bias : -bias;
    }
  }
  return prior;
}

void FitConfig::Validate() const {
  if (n_steps < 1) throw ConventionError("n_steps must be positive");
  if (!(learning_rate > 0.0)) throw ConventionError("learning_rate must be positive");
  if (n_mc_elbo < 1) throw ConventionError("n_mc_elbo must be positive");
  if (n_mc_predictive < 1) throw ConventionError("n_mc_predictive must be positive");
  if (!(average_fraction > 0.0 && average_fraction <= 1.0)) {
    throw ConventionError("average_fraction must lie in (0, 1]");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConventionError("Adam betas must lie in [0, 1)");
  }
}

GaussianGuide GaussianGuide::FromPrior(const PriorSpec& prior, PoolingRegime regime,
                                       std::span<const int> partner_ids) {
  GaussianGuide guide;
  if (regime == PoolingRegime::kPartial) guide.theta = PriorBlock(prior, prior.theta_prior_std);
  if (regime == PoolingRegime::kComplete) {
    guide.phi.emplace(kPooledPartner, PriorBlock(prior, prior.pooled_std()));
  } else {
    for (int id : partner_ids) guide.AddPartner(prior, regime, id);
  }
  return guide;
}

void GaussianGuide::AddPartner(const PriorSpec& prior, PoolingRegime regime, int partner_id) {
  if (regime == PoolingRegime::kComplete || phi.contains(partner_id)) return;
  const double std =
      regime == PoolingRegime::kPartial ? prior.phi_drift_std : prior.pooled_std();
  phi.emplace(partner_id, PriorBlock(prior, std));
}

std::size_t GaussianGuide::num_params() const {
  std::size_t n = theta ? theta->mean.size() * 2 : 0;
  for (const auto& [id, block] : phi) n += block.mean.size() * 2;
  return n;
}

std::vector<double> GaussianGuide::Flatten() const {
  std::vector<double> flat;
  flat.reserve(num_params());
  auto push = [&flat](const GaussianBlock& b) {
    flat.insert(flat.end(), b.mean.begin(), b.mean.end());
    flat.insert(flat.end(), b.log_std.begin(), b.log_std.end());
  };
  if (theta) push(*theta);
  for (const auto& [id, block] : phi) push(block);
  return flat;
}

void GaussianGuide::Unflatten(std::span<const double> flat) {
  if (flat.size() != num_params()) throw ConventionError("flat guide size mismatch");
  std::size_t pos = 0;
  auto pull = [&](GaussianBlock& b) {
    for (double& v : b.mean) v = flat[pos++];
    for (double& v : b.log_std) v = flat[pos++];
  };
  if (theta) pull(*theta);
  for (auto& [id, block] : phi) pull(block);
}

double log_joint(const HyperLexicon& theta, std::span<const LexiconMatrix> phi_all,
                 std::span<const ObservationLog> data, const PriorSpec& prior,
                 const RsaConfig& cfg, PoolingRegime regime) {
  LatentModel model(data, prior, cfg, regime);
  const std::size_t expected_blocks =
      regime == PoolingRegime::kComplete ? 1 : data.size();
  if (phi_all.size() != expected_blocks) {
    throw ConventionError("expected " + std::to_string(expected_blocks) + " lexicons, got " +
                          std::to_string(phi_all.size()));
  }
  // The model orders lexicon blocks by partner id; map data order onto it.
  std::vector<std::pair<int, const LexiconMatrix*>> ordered;
  for (std::size_t k = 0; k < phi_all.size(); ++k) {
    if (!phi_all[k].Matches(cfg.vocab)) throw ConventionError("lexicon shape mismatch");
    const int id = regime == PoolingRegime::kComplete ? kPooledPartner : data[k].partner_id();
    ordered.emplace_back(id, &phi_all[k]);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> z;
  if (regime == PoolingRegime::kPartial) {
    if (!theta.Matches(cfg.vocab)) throw ConventionError("hyper-lexicon shape mismatch");
    z.insert(z.end(), theta.values().begin(), theta.values().end());
  }
  for (const auto& [id, phi] : ordered) z.insert(z.end(), phi->values().begin(), phi->values().end());
  return model.LogJoint(z, {});
}

ElboEstimate elbo(const GaussianGuide& guide, std::span<const ObservationLog> data,
                  const PriorSpec& prior, const RsaConfig& cfg, PoolingRegime regime, int n_mc,
                  std::uint64_t seed) {
  LatentModel model(data, prior, cfg, regime);
  model.CheckGuide(guide);
  return model.Estimate(guide.Flatten(), n_mc, seed, {});
}

GuideGradient elbo_gradient(const GaussianGuide& guide, std::span<const ObservationLog> data,
                            const PriorSpec& prior, const RsaConfig& cfg, PoolingRegime regime,
                            int n_mc, std::uint64_t seed) {
  LatentModel model(data, prior, cfg, regime);
  model.CheckGuide(guide);
  std::vector<double> grad(model.num_params());
  model.Estimate(guide.Flatten(), n_mc, seed, grad);
  GuideGradient out = guide;
  out.Unflatten(grad);
  return out;
}

GaussianGuide fit(const GaussianGuide& guide, std::span<const ObservationLog> data,
                  const PriorSpec& prior, const RsaConfig& cfg, PoolingRegime regime,
                  const FitConfig& fit_cfg) {
  fit_cfg.Validate();
  LatentModel model(data, prior, cfg, regime);
  model.CheckGuide(guide);
  std::vector<double> params = guide.Flatten();
  std::vector<double> grad(params.size());
  std::vector<double> m1(params.size(), 0.0);
  std::vector<double> m2(params.size(), 0.0);
  constexpr double kAdamEps = 1e-8;
  double b1_pow = 1.0;
  double b2_pow = 1.0;
  // Tail average of the iterates over the final steps.
  const int average_from =
      fit_cfg.n_steps - std::max(1, static_cast<int>(fit_cfg.n_steps * fit_cfg.average_fraction));
  std::vector<double> average(params.size(), 0.0);
  int averaged = 0;
  for (int step = 0; step < fit_cfg.n_steps; ++step) {
    model.Estimate(params, fit_cfg.n_mc_elbo, DeriveSeed(fit_cfg.seed, step), grad);
    b1_pow *= fit_cfg.beta1;
    b2_pow *= fit_cfg.beta2;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m1[i] = fit_cfg.beta1 * m1[i] + (1.0 - fit_cfg.beta1) * grad[i];
      m2[i] = fit_cfg.beta2 * m2[i] + (1.0 - fit_cfg.beta2) * grad[i] * grad[i];
      const double m_hat = m1[i] / (1.0 - b1_pow);
      const double v_hat = m2[i] / (1.0 - b2_pow);
      params[i] += fit_cfg.learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEps);
      if (!std::isfinite(params[i])) {
        throw InferenceError("non-finite guide parameter " + std::to_string(i) +
                             " at optimization step " + std::to_string(step));
      }
    }
    if (step >= average_from) {
      ++averaged;
      for (std::size_t i = 0; i < params.size(); ++i) {
        average[i] += (params[i] - average[i]) / averaged;
      }
    }
  }
  GaussianGuide out = guide;
  out.Unflatten(average);
  return out;
}

ObjectDistribution PredictiveTables::Listener(const Utterance& u) const {
  const int ui = vocab.IndexOf(u);
  ObjectDistribution dist;
  for (int o = 0; o < vocab.n_objects(); ++o) {
    dist.support.push_back(ObjectId{o});
    dist.probs.push_back(listener[ui * vocab.n_objects() + o]);
  }
  return dist;
}

UtteranceDistribution PredictiveTables::Speaker(ObjectId o) const {
  vocab.CheckObject(o);
  UtteranceDistribution dist;
  dist.support = vocab.utterances();
  const auto row = speaker.begin() + o.index * vocab.n_utterances();
  dist.probs.assign(row, row + vocab.n_utterances());
  return dist;
}

PredictiveTables predictive_tables(const GaussianGuide& guide, const RsaConfig& cfg,
                                   const PriorSpec& prior, PoolingRegime regime, int partner_id,
                                   int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw ConventionError("n_samples must be at least 1");
  prior.Validate(cfg.vocab);
  const int n_obj = cfg.vocab.n_objects();
  const int n_utt = cfg.vocab.n_utterances();
  const int entries = n_obj * cfg.vocab.n_primitives();

  // Resolve where lexicon draws come from.
  const GaussianBlock* block = nullptr;
  const GaussianBlock* hyper = nullptr;
  if (regime == PoolingRegime::kComplete) {
    const auto it = guide.phi.find(kPooledPartner);
    if (it == guide.phi.end()) throw ConventionError("complete-pooling guide lacks shared block");
    block = &it->second;
  } else if (const auto it = guide.phi.find(partner_id); it != guide.phi.end()) {
    block = &it->second;
  } else if (regime == PoolingRegime::kPartial) {
    if (!guide.theta) throw ConventionError("partial-pooling guide lacks theta block");
    hyper = &*guide.theta;
  }
  for (const GaussianBlock* b : {block, hyper}) {
    if (b && static_cast<int>(b->mean.size()) != entries) {
      throw ConventionError("guide block shape does not match vocabulary");
    }
  }

  // Per-entry Gaussian each lexicon draw comes from. For a novel partner under
  // partial pooling, theta ~ N(m, s) followed by phi ~ N(theta, drift) is the
  // same as phi ~ N(m, sqrt(s^2 + drift^2)).
  std::vector<double> draw_mean(entries);
  std::vector<double> draw_std(entries);
  const auto prior_mean = prior.theta_prior_mean.values();
  for (int i = 0; i < entries; ++i) {
    if (block) {
      draw_mean[i] = block->mean[i];
      draw_std[i] = std::exp(block->log_std[i]);
    } else if (hyper) {
      const double s = std::exp(hyper->log_std[i]);
      draw_mean[i] = hyper->mean[i];
      draw_std[i] = std::sqrt(s * s + prior.phi_drift_std * prior.phi_drift_std);
    } else {
      draw_mean[i] = prior_mean[i];
      draw_std[i] = prior.pooled_std();
    }
  }

  RsaTables tables(cfg);
  ShiftedSobolNormals normals(entries, seed);
  std::vector<double> phi(entries);
  std::vector<double> listener_mass(static_cast<std::size_t>(n_utt) * n_obj, 0.0);
  std::vector<double> speaker_log(static_cast<std::size_t>(n_obj) * n_utt, 0.0);
  for (int s = 0; s < n_samples; ++s) {
    const auto z = normals.Next();
    for (int i = 0; i < entries; ++i) phi[i] = draw_mean[i] + draw_std[i] * z[i];
    tables.Compute(phi);
    for (int u = 0; u < n_utt; ++u) {
      for (int o = 0; o < n_obj; ++o) {
        listener_mass[u * n_obj + o] += std::exp(tables.log_s1(o, u));
        speaker_log[o * n_utt + u] +=
            cfg.w_informativity * std::max(tables.log_l1(u, o), kLogProbFloor);
      }
    }
  }

  PredictiveTables out;
  out.vocab = cfg.vocab;
  out.listener.resize(listener_mass.size());
  for (int u = 0; u < n_utt; ++u) {
    double total = 0.0;
    for (int o = 0; o < n_obj; ++o) total += listener_mass[u * n_obj + o];
    if (!(total > 0.0)) {
      throw InferenceError("predictive listener has zero mass for " +
                           cfg.vocab.utterance(u).ToString());
    }
    for (int o = 0; o < n_obj; ++o) {
      out.listener[u * n_obj + o] = listener_mass[u * n_obj + o] / total;
    }
  }
  out.speaker.resize(speaker_log.size());
  for (int o = 0; o < n_obj; ++o) {
    double hi = -std::numeric_limits<double>::infinity();
    for (int u = 0; u < n_utt; ++u) {
      double& v = speaker_log[o * n_utt + u];
      v = v / n_samples - cfg.w_cost * utterance_cost(cfg.vocab.utterance(u));
      hi = std::max(hi, v);
    }
    double total = 0.0;
    for (int u = 0; u < n_utt; ++u) total += std::exp(speaker_log[o * n_utt + u] - hi);
    for (int u = 0; u < n_utt; ++u) {
      out.speaker[o * n_utt + u] = std::exp(speaker_log[o * n_utt + u] - hi) / total;
    }
  }
  return out;
}

ObjectDistribution predictive_listener(const GaussianGuide& guide, const Utterance& u,
                                       const RsaConfig& cfg, const PriorSpec& prior,
                                       PoolingRegime regime, int partner_id, int n_samples,
                                       std::uint64_t seed) {
  return predictive_tables(guide, cfg, prior, regime, partner_id, n_samples, seed).Listener(u);
}

UtteranceDistribution predictive_speaker(const GaussianGuide& guide, ObjectId o,
                                         const RsaConfig& cfg, const PriorSpec& prior,
                                         PoolingRegime regime, int partner_id, int n_samples,
                                         std::uint64_t seed) {
  return predictive_tables(guide, cfg, prior, regime, partner_id, n_samples, seed).Speaker(o);
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = SplitMix64(base);
  h = SplitMix64(h ^ a);
  h = SplitMix64(h ^ (b + 0x632be59bd9b4e019ULL));
  return SplitMix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
}

}  // namespace convention
