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

#ifndef CONVENTION_SUMMARY_H_
#define CONVENTION_SUMMARY_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "convention/network_sim.h"

namespace convention {

// One observation of a metric in one run. Several samples with the same key
// and run are averaged before resampling.
struct MetricSample {
  std::string sim;
  std::string regime;
  std::string metric;
  int trial = 0;
  int run_id = 0;
  double value = 0.0;
};

struct SummaryRow {
  std::string sim;
  std::string regime;
  std::string metric;
  int trial = 0;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Mean and percentile-bootstrap 95% interval per (sim, regime, metric, trial),
// resampling whole runs. Rows come out sorted by that key.
std::vector<SummaryRow> summarize(std::span<const MetricSample> samples, int n_bootstrap = 1000,
                                  std::uint64_t seed = 0);

// Per-trial metrics: listener_target_prob, accuracy, utterance_length and
// expected_utterance_length.
std::vector<MetricSample> TrialMetrics(std::span<const TrialRecord> trials);

// alignment_within / alignment_across, with the block number in the trial
// slot.
std::vector<MetricSample> AlignmentMetrics(std::span<const AlignmentRecord> alignment);

}  // namespace convention

#endif  // CONVENTION_SUMMARY_H_
