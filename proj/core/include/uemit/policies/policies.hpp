// Copyright 2026 The uemit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "uemit/env.hpp"
#include "uemit/features.hpp"
#include "uemit/policies/forest.hpp"

namespace uemit {

enum class PolicyKind { never, always, oracle, sc20_rf, sc20_rf_offset, myopic_rf, rl };

struct PolicySpec {
  PolicyKind kind = PolicyKind::never;
  double threshold = 0.5;  // sc20_rf
  double delta = 0.0;      // sc20_rf_offset: offset from the optimal threshold
  std::string checkpoint;  // rl

  void validate() const;
  /// Stable report label, e.g. "never", "sc20_rf", "sc20_rf_2pct".
  std::string label() const;
};

PolicyFn never_policy();
PolicyFn always_policy();

/// Events to mitigate per node (indices into each node's full timeline): the
/// event immediately before each UE inside `interval`, unless that event is
/// itself a UE or there is none.
std::vector<std::vector<std::size_t>> oracle_decisions(const Dataset& data, const Interval& interval);
PolicyFn oracle_policy(const Dataset& data, const Interval& interval);

/// Log-derived features used by the forest.
std::array<double, kLogFeatureCount> rf_features(const StateFeatures& state);

/// One sample per non-UE event in `interval`; the label is 1 iff the node has a
/// UE in (t, t + window] that also lies inside the interval.
LabeledSamples rf_training_set(const Dataset& data, const Interval& interval,
                               std::int64_t window_seconds = kSecondsPerDay);

/// Forest probability for every event of every node (indexed like Dataset::nodes()).
using ProbabilityTable = std::vector<std::vector<double>>;
ProbabilityTable predict_all(const RandomForest& forest, const Dataset& data, const Interval& interval);

/// Mitigate iff p > threshold.
PolicyFn sc20_rf_policy(const RandomForest& forest, double threshold);
PolicyFn sc20_rf_policy(const ProbabilityTable& probabilities, double threshold);

/// Mitigate iff p * potential_ue_cost > mitigation cost, both in node-hours.
PolicyFn myopic_rf_policy(const RandomForest& forest, const MitigationPolicyConfig& mitigation);
PolicyFn myopic_rf_policy(const ProbabilityTable& probabilities, const MitigationPolicyConfig& mitigation);

/// Default threshold grid: 0.00, 0.01, ..., 1.00.
std::vector<double> default_threshold_grid();

struct ThresholdChoice {
  double threshold = 0.0;
  double cost = 0.0;
};

struct ThresholdSearchResult {
  ThresholdChoice optimal;
  ThresholdChoice offset_2pct;  // worse of optimal +/- 0.02
  ThresholdChoice offset_5pct;  // worse of optimal +/- 0.05
  std::vector<ThresholdChoice> curve;
};

/// Total replay cost of sc20_rf for each grid threshold; the minimum wins,
/// ties going to the smallest threshold. Offsets are absolute and clamped to [0, 1].
ThresholdSearchResult optimal_threshold(const ProbabilityTable& probabilities, const Dataset& data,
                                        const JobPool& pool, const Interval& interval, const EnvConfig& config,
                                        std::uint64_t eval_seed,
                                        const std::vector<double>& grid = default_threshold_grid());

}  // namespace uemit
