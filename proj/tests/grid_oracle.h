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

// Test-only exact posterior for a single 2-object x 2-primitive lexicon with
// independent N(prior_mean, prior_std) entries, evaluated on a tensor grid of
// 201 points per entry over [-6, 6].
//
// Every RSA quantity on this lexicon depends only on the per-primitive
// differences d_p = phi[0][p] - phi[1][p], and grid differences land on a grid
// with the same spacing. The 4-D grid sum therefore collapses exactly to a
// 2-D sum over (d_0, d_1) weighted by the discrete convolution of the entry
// weights, which keeps the full 201^4 rule tractable.

#ifndef CONVENTION_TESTS_GRID_ORACLE_H_
#define CONVENTION_TESTS_GRID_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "convention/lexicon.h"
#include "convention/rsa.h"

namespace convention::testing {

class GridPosterior {
 public:
  static constexpr int kPoints = 201;
  static constexpr double kLo = -6.0;
  static constexpr double kHi = 6.0;

  // prior_mean is object-major (4 entries).
  GridPosterior(std::span<const ObservationRecord> records, const RsaConfig& cfg,
                std::span<const double> prior_mean, double prior_std)
      : step_((kHi - kLo) / (kPoints - 1)) {
    for (int i = 0; i < kPoints; ++i) grid_.push_back(kLo + i * step_);
    // Normalized prior weights of each entry on the grid.
    for (int e = 0; e < 4; ++e) {
      std::vector<double> w(kPoints);
      double total = 0.0;
      for (int i = 0; i < kPoints; ++i) {
        const double r = (grid_[i] - prior_mean[e]) / prior_std;
        w[i] = std::exp(-0.5 * r * r);
        total += w[i];
      }
      for (double& v : w) v /= total;
      weights_.push_back(w);
    }
    // Difference weights per primitive p: entries (0,p) and (1,p).
    constexpr int kDiffs = 2 * kPoints - 1;
    for (int p = 0; p < 2; ++p) {
      std::vector<double> w(kDiffs, 0.0);
      for (int i = 0; i < kPoints; ++i) {
        for (int j = 0; j < kPoints; ++j) w[i - j + kPoints - 1] += weights_[p][i] * weights_[2 + p][j];
      }
      diff_weights_.push_back(w);
    }
    // Log-likelihood on the difference grid.
    log_lik_.assign(static_cast<std::size_t>(kDiffs) * kDiffs, 0.0);
    LexiconMatrix phi(2, 2);
    for (int a = 0; a < kDiffs; ++a) {
      for (int b = 0; b < kDiffs; ++b) {
        phi.at(0, 0) = (a - (kPoints - 1)) * step_;
        phi.at(0, 1) = (b - (kPoints - 1)) * step_;
        double ll = 0.0;
        for (const auto& r : records) ll += datum_log_likelihood(phi, r, cfg);
        log_lik_[a * kDiffs + b] = ll;
      }
    }
    double hi = -1e300;
    for (double v : log_lik_) hi = std::max(hi, v);
    double evidence = 0.0;
    for (int a = 0; a < kDiffs; ++a) {
      for (int b = 0; b < kDiffs; ++b) {
        evidence += diff_weights_[0][a] * diff_weights_[1][b] * std::exp(log_lik_[a * kDiffs + b] - hi);
      }
    }
    log_evidence_ = hi + std::log(evidence);
    // Likelihood marginalized over the other primitive's difference.
    for (int p = 0; p < 2; ++p) {
      std::vector<double> g(kDiffs, 0.0);
      for (int a = 0; a < kDiffs; ++a) {
        for (int b = 0; b < kDiffs; ++b) {
          const double lik = std::exp(log_lik_[(p == 0 ? a * kDiffs + b : b * kDiffs + a)] - hi);
          g[a] += diff_weights_[1 - p][b] * lik;
        }
      }
      marginal_lik_.push_back(g);
    }
  }

  // log of the grid-discretized evidence, with the prior normalized on the grid.
  double log_evidence() const { return log_evidence_; }
  const std::vector<double>& grid() const { return grid_; }
  double step() const { return step_; }

  // Posterior probability mass of entry (object, primitive) at each grid point.
  std::vector<double> Marginal(int object, int primitive) const {
    const int self = object * 2 + primitive;
    const int other = (1 - object) * 2 + primitive;
    const auto& g = marginal_lik_[primitive];
    std::vector<double> mass(kPoints, 0.0);
    double total = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      double acc = 0.0;
      for (int j = 0; j < kPoints; ++j) {
        const int diff = object == 0 ? i - j : j - i;
        acc += weights_[other][j] * g[diff + kPoints - 1];
      }
      mass[i] = weights_[self][i] * acc;
      total += mass[i];
    }
    for (double& m : mass) m /= total;
    return mass;
  }

  // Total variation between a grid marginal and N(mean, std) discretized to
  // the same grid cells.
  double TotalVariation(const std::vector<double>& mass, double mean, double std) const {
    std::vector<double> q(kPoints);
    double total = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double r = (grid_[i] - mean) / std;
      q[i] = std::exp(-0.5 * r * r);
      total += q[i];
    }
    double tv = 0.0;
    for (int i = 0; i < kPoints; ++i) tv += std::abs(mass[i] - q[i] / total);
    return 0.5 * tv;
  }

 private:
  double step_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> diff_weights_;
  std::vector<double> log_lik_;
  std::vector<std::vector<double>> marginal_lik_;
  double log_evidence_ = 0.0;
};

}  // namespace convention::testing

#endif  // CONVENTION_TESTS_GRID_ORACLE_H_
