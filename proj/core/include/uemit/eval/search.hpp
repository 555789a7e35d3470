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
#include <optional>
#include <string>
#include <vector>

#include "uemit/agent/dqn.hpp"
#include "uemit/env.hpp"
#include "uemit/eval/splits.hpp"

namespace uemit {

/// Random-search ranges. Values not listed here are copied from the base
/// hyperparameters.
struct SearchSpace {
  double learning_rate_min = 1e-5;
  double learning_rate_max = 1e-3;  // log-uniform
  std::vector<double> gammas = {0.9, 0.95, 0.99, 0.999};
  std::vector<int> batch_sizes = {32, 64, 128};
  int sync_min = 200;
  int sync_max = 5000;  // log-uniform, rounded
  double alpha_min = 0.4;
  double alpha_max = 0.8;
  double beta_start_min = 0.4;
  double beta_start_max = 0.6;

  void validate() const;
};

Hyperparameters sample_hyperparameters(const SearchSpace& space, const Hyperparameters& base, Rng& rng);

/// Narrowed second-round proposal: continuous values scaled by 2^u with
/// u ~ U(-1, 1), grid values moved at most one step.
Hyperparameters perturb_hyperparameters(const SearchSpace& space, const Hyperparameters& center, Rng& rng);

struct SearchConfig {
  int n_first = 60;
  int n_second = 20;
  long episodes = 20000;
  std::uint64_t seed = 1;
  int jobs = 1;  // concurrent candidates
  double warm_fraction = 0.5;
  SearchSpace space;
  Hyperparameters base;
  TrainingCostModel cost;
  /// Optional progress sink; called from worker threads under a lock.
  std::function<void(const std::string&)> log;
};

struct CandidateResult {
  int round = 1;
  int index = 0;
  bool warm_started = false;
  Hyperparameters hp;
  double train_cost = 0.0;       // replayed total cost on the training interval
  double validation_cost = 0.0;  // replayed total cost on the validation interval
  TrainingStats stats;
};

struct SearchResult {
  AgentModel best;
  CandidateResult best_candidate;
  std::vector<CandidateResult> candidates;
  bool selected_on_training = false;  // validation interval had no UEs
  double total_training_cost = 0.0;   // node-hours across all candidates
  double total_wallclock_seconds = 0.0;
};

/// Two-round random search for one split. Round 1 trains n_first candidates
/// (a warm_fraction share starts from `warm_start` when given) and keeps the
/// best on the training interval; round 2 trains n_second perturbations of it.
/// The final agent is the round-1 winner or a round-2 candidate with the
/// lowest validation cost, or the lowest training cost when validation has no
/// UEs. Ties go to the earlier candidate. Deterministic for any `jobs`.
SearchResult hyperparameter_search(const Dataset& data, const JobPool& pool, const Split& split,
                                   const EnvConfig& env_config, const SearchConfig& config,
                                   std::uint64_t eval_seed, const AgentModel* warm_start = nullptr);

/// Runs task(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task);

}  // namespace uemit
