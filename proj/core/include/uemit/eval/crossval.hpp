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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uemit/agent/dqn.hpp"
#include "uemit/env.hpp"
#include "uemit/eval/metrics.hpp"
#include "uemit/eval/search.hpp"
#include "uemit/eval/splits.hpp"
#include "uemit/policies/forest.hpp"
#include "uemit/policies/policies.hpp"

namespace uemit {

/// One policy on one split (split 0 holds the totals).
struct CostRow {
  std::string policy;
  int split = 0;
  double ue_cost = 0.0;          // node-hours
  double mitigation_cost = 0.0;  // node-hours, includes training_cost
  std::int64_t mitigations = 0;
  ClassicalMetrics metrics;
  double training_cost = 0.0;      // node-hours charged to learned policies
  double cumulative_reward = 0.0;  // sum of replayed rewards
  std::optional<double> threshold;

  double total() const { return ue_cost + mitigation_cost; }
};

struct CostReport {
  double mitigation_cost_minutes = 2.0;
  std::vector<CostRow> rows;

  /// Policy labels in first-appearance order.
  std::vector<std::string> policies() const;
  const CostRow* find(const std::string& policy, int split) const;
  /// Sum over splits.
  CostRow total(const std::string& policy) const;

  /// policy,split,ue_cost,mitigation_cost,mitigations,tp,fn,fp,tn; one row per
  /// policy and split, then one "all" row per policy.
  std::string to_csv() const;
  /// policy,tp,fn,fp,tn,recall,precision over all splits; empty cells are undefined ratios.
  std::string metrics_csv() const;
};

/// Stacked cost bars per policy and mitigation cost setting:
/// mitigation_cost_minutes,policy,ue_cost,mitigation_cost,total.
std::string cost_breakdown_csv(const std::vector<CostReport>& reports);

enum class ThresholdMode { test, validation };

/// An agent trained earlier, with the node-hours its training cost.
struct PretrainedAgent {
  AgentModel model;
  double training_cost = 0.0;
};

struct CrossvalConfig {
  EnvConfig env;
  std::uint64_t eval_seed = 1;
  SearchConfig search;
  ForestParams forest;
  ThresholdMode threshold_mode = ThresholdMode::test;
  bool run_rl = true;
  bool run_rf = true;
  std::vector<int> splits;  // 1-based; empty means all six
  std::map<int, PretrainedAgent> pretrained;  // by split; skips the search for that split
  std::function<void(const std::string&)> log;
};

struct SplitArtifacts {
  Split split;
  std::optional<SearchResult> search;
  std::optional<RandomForest> forest;
  std::optional<ThresholdSearchResult> threshold;
};

struct CrossvalResult {
  SplitPlan plan;
  CostReport report;
  std::vector<SplitArtifacts> splits;
};

/// Evaluates every policy on each split's test interval with a shared
/// evaluation job assignment. The forest is trained on the data before the
/// test interval (training only in validation threshold mode); the RL agent
/// comes from hyperparameter_search, warm-started from the previous split's
/// winner, and is charged the search's training cost.
CrossvalResult run_crossval(const Dataset& data, const JobPool& pool, const CrossvalConfig& config);

/// Cost row for one replay.
CostRow make_row(const std::string& policy, int split, const ReplayResult& replay, const EnvConfig& env,
                 double training_cost = 0.0);

}  // namespace uemit
