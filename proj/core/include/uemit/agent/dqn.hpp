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
#include <optional>
#include <span>
#include <vector>

#include "uemit/agent/network.hpp"
#include "uemit/agent/replay_buffer.hpp"
#include "uemit/env.hpp"
#include "uemit/features.hpp"
#include "uemit/rng.hpp"

namespace uemit {

struct Hyperparameters {
  double learning_rate = 2.5e-4;
  double gamma = 0.99;  // per event
  int batch_size = 64;
  int train_frequency = 4;            // environment steps per gradient step
  int target_sync_frequency = 1000;   // environment steps between hard target syncs
  double alpha = 0.6;
  double beta_start = 0.4;
  double beta_end = 1.0;
  double epsilon_start = 1.0;
  double epsilon_end = 0.02;
  long epsilon_decay_steps = 20000;
  std::size_t buffer_capacity = 100000;
  double priority_epsilon = 1e-6;
  long learning_starts = 1000;  // environment steps before the first gradient step
  double reward_scale = 0.1;    // rewards are multiplied by this before learning
  double max_grad_norm = 10.0;  // global gradient norm clip; <= 0 disables
  std::vector<int> hidden = QNetwork::default_hidden();

  void validate() const;
  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// Linear decay from epsilon_start to epsilon_end over epsilon_decay_steps.
double epsilon_at(const Hyperparameters& hp, long step);

/// argmax over Q with ties broken toward action 0.
int greedy_action(const std::array<double, kNumActions>& q);

/// With probability epsilon a uniformly random action, else the greedy one.
int select_action(const QNetwork& net, std::span<const double> state, double epsilon, Rng& rng);

/// Double-Q target: r if terminal, else r + gamma * Q_target(s', argmax_a Q_online(s', a)).
double td_target(const QNetwork& online, const QNetwork& target, const StoredTransition& transition, double gamma);

/// Copies online parameters into target bit for bit.
void sync_target(const QNetwork& online, QNetwork& target);

struct TrainStepResult {
  bool performed = false;  // false when the buffer holds fewer than batch_size items
  double loss = 0.0;
};

/// One prioritized, importance-weighted gradient step on the online network.
TrainStepResult train_step(PrioritizedReplay& buffer, QNetwork& online, const QNetwork& target, Adam& optimizer,
                           const Hyperparameters& hp, double beta, Rng& rng);

/// A trained agent: network, the normalization it expects, and its settings.
struct AgentModel {
  Hyperparameters hp;
  QNetwork net{static_cast<int>(kFeatureCount)};
  Normalizer normalizer;

  std::array<double, kNumActions> q_values(const StateFeatures& state) const;
  int act(const StateFeatures& state) const { return greedy_action(q_values(state)); }
  /// Greedy policy over a copy of this model.
  PolicyFn policy() const;
};

/// Converts training work into node-hours. By default the cost is modeled from
/// step counts, which keeps reports reproducible; measured wallclock can be used instead.
struct TrainingCostModel {
  double seconds_per_env_step = 2e-5;
  double seconds_per_gradient_step = 4e-3;
  double nodes_used = 1.0;
  bool use_wallclock = false;
};

struct TrainingOptions {
  long episodes = 20000;
  std::uint64_t seed = 1;
  const AgentModel* warm_start = nullptr;  // initial parameters and normalizer
  TrainingCostModel cost;
};

struct TrainingStats {
  long episodes = 0;
  long env_steps = 0;
  long gradient_steps = 0;
  double wallclock_seconds = 0.0;
  double cost_node_hours = 0.0;
  double mean_episode_reward = 0.0;
  double final_loss = 0.0;
};

struct TrainedAgent {
  AgentModel model;
  TrainingStats stats;
};

/// Fits feature normalization on states observed while replaying the Never
/// policy over `interval`.
Normalizer fit_normalizer(const Dataset& data, const JobPool& pool, const Interval& interval, const EnvConfig& config,
                          std::uint64_t seed);

/// Trains a dueling double DQN with prioritized replay on `env`. Fully
/// deterministic for a fixed seed; wallclock is only recorded.
TrainedAgent train_agent(Environment& env, const Normalizer& normalizer, const Hyperparameters& hp,
                         const TrainingOptions& options);

}  // namespace uemit
