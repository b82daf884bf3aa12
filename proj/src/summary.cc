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

#include "convention/summary.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <tuple>
#include <utility>

namespace convention {

namespace {

using GroupKey = std::tuple<std::string, std::string, std::string, int>;

// Linear-interpolation quantile of sorted values.
double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const MetricSample> samples, int n_bootstrap,
                                  std::uint64_t seed) {
  if (samples.empty()) throw ConventionError("summarize: no samples");
  if (n_bootstrap < 1) throw ConventionError("summarize: n_bootstrap must be positive");

  // group -> run -> (sum, count)
  std::map<GroupKey, std::map<int, std::pair<double, int>>> groups;
  for (const auto& s : samples) {
    if (!std::isfinite(s.value)) {
      throw ConventionError("summarize: non-finite " + s.metric + " in run " +
                            std::to_string(s.run_id) + " trial " + std::to_string(s.trial));
    }
    auto& cell = groups[{s.sim, s.regime, s.metric, s.trial}][s.run_id];
    cell.first += s.value;
    cell.second += 1;
  }

  std::vector<SummaryRow> rows;
  std::uint64_t group_index = 0;
  for (const auto& [key, runs] : groups) {
    if (runs.size() < 2) {
      throw ConventionError("summarize: " + std::get<2>(key) + " trial " +
                            std::to_string(std::get<3>(key)) + " has fewer than 2 runs");
    }
    std::vector<double> per_run;
    for (const auto& [run, cell] : runs) per_run.push_back(cell.first / cell.second);
    const auto n = per_run.size();
    double total = 0.0;
    for (double v : per_run) total += v;

    std::mt19937_64 rng(DeriveSeed(seed, group_index++));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> means(n_bootstrap);
    for (auto& m : means) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += per_run[pick(rng)];
      m = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());

    SummaryRow row;
    std::tie(row.sim, row.regime, row.metric, row.trial) = key;
    row.mean = total / static_cast<double>(n);
    row.ci_low = Quantile(means, 0.025);
    row.ci_high = Quantile(means, 0.975);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<MetricSample> TrialMetrics(std::span<const TrialRecord> trials) {
  std::vector<MetricSample> out;
  out.reserve(trials.size() * 4);
  for (const auto& t : trials) {
    const std::string sim = SimName(t.sim);
    const std::string regime = RegimeName(t.regime);
    auto add = [&](const char* metric, double value) {
      out.push_back({sim, regime, metric, t.trial, t.run_id, value});
    };
    add("listener_target_prob", t.listener_target_prob);
    add("accuracy", t.choice == t.target ? 1.0 : 0.0);
    add("utterance_length", t.utterance_length);
    add("expected_utterance_length", t.expected_utterance_length);
  }
  return out;
}

std::vector<MetricSample> AlignmentMetrics(std::span<const AlignmentRecord> alignment) {
  std::vector<MetricSample> out;
  out.reserve(alignment.size());
  for (const auto& a : alignment) {
    out.push_back({SimName(Sim::kSim3), RegimeName(a.regime),
                   std::string("alignment_") + PairTypeName(a.pair_type), a.block, a.run_id,
                   a.aligned ? 1.0 : 0.0});
  }
  return out;
}

}  // namespace convention
