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

#include "uemit/agent/dqn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uemit {

void Hyperparameters::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("hyperparameters: ") + what);
  };
  require(learning_rate > 0.0, "learning_rate must be > 0");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  require(batch_size > 0, "batch_size must be > 0");
  require(train_frequency > 0, "train_frequency must be > 0");
  require(target_sync_frequency > 0, "target_sync_frequency must be > 0");
  require(alpha >= 0.0, "alpha must be >= 0");
  require(beta_start >= 0.0 && beta_end >= 0.0, "beta must be >= 0");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0,
          "epsilon must lie in [0, 1]");
  require(epsilon_decay_steps > 0, "epsilon_decay_steps must be > 0");
  require(buffer_capacity > 0, "buffer_capacity must be > 0");
  require(priority_epsilon > 0.0, "priority_epsilon must be > 0");
  require(learning_starts >= 0, "learning_starts must be >= 0");
  require(reward_scale > 0.0, "reward_scale must be > 0");
  require(!hidden.empty(), "hidden layers must not be empty");
}

double epsilon_at(const Hyperparameters& hp, long step) {
  const double frac = std::min(1.0, static_cast<double>(std::max(0L, step)) / static_cast<double>(hp.epsilon_decay_steps));
  return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * frac;
}

int greedy_action(const std::array<double, kNumActions>& q) { return q[1] > q[0] ? 1 : 0; }

int select_action(const QNetwork& net, std::span<const double> state, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("select_action: epsilon must lie in [0, 1]");
  if (epsilon > 0.0 && rng.uniform() < epsilon) return static_cast<int>(rng.uniform_index(kNumActions));
  return greedy_action(net.forward(state));
}

double td_target(const QNetwork& online, const QNetwork& target, const StoredTransition& t, double gamma) {
  if (t.terminal || gamma == 0.0) return t.reward;
  const int a = greedy_action(online.forward(t.next_state));
  return t.reward + gamma * target.forward(t.next_state)[static_cast<std::size_t>(a)];
}

void sync_target(const QNetwork& online, QNetwork& target) {
  if (online.input_dim() != target.input_dim() || online.hidden() != target.hidden())
    throw std::invalid_argument("sync_target: architecture mismatch");
  target.parameters() = online.parameters();
}

TrainStepResult train_step(PrioritizedReplay& buffer, QNetwork& online, const QNetwork& target, Adam& optimizer,
                           const Hyperparameters& hp, double beta, Rng& rng) {
  const auto batch = static_cast<std::size_t>(hp.batch_size);
  if (buffer.size() < batch) return {};
  const auto sample = buffer.sample(batch, beta, rng);
  const int dim = online.input_dim();

  Eigen::MatrixXd states(dim, static_cast<Eigen::Index>(batch));
  Eigen::MatrixXd next(dim, static_cast<Eigen::Index>(batch));
  std::vector<int> actions(batch);
  for (std::size_t k = 0; k < batch; ++k) {
    const auto& t = buffer.at(sample.indices[k]);
    for (int j = 0; j < dim; ++j) {
      states(j, static_cast<Eigen::Index>(k)) = t.state[static_cast<std::size_t>(j)];
      next(j, static_cast<Eigen::Index>(k)) = t.next_state[static_cast<std::size_t>(j)];
    }
    actions[k] = t.action;
  }

  // Batched double-Q targets; same arithmetic as td_target.
  std::vector<double> targets(batch);
  const Eigen::MatrixXd q_online_next = online.forward_batch(next);
  const Eigen::MatrixXd q_target_next = target.forward_batch(next);
  for (std::size_t k = 0; k < batch; ++k) {
    const auto& t = buffer.at(sample.indices[k]);
    const auto c = static_cast<Eigen::Index>(k);
    if (t.terminal || hp.gamma == 0.0) {
      targets[k] = t.reward;
    } else {
      const int a = greedy_action({q_online_next(0, c), q_online_next(1, c)});
      targets[k] = t.reward + hp.gamma * q_target_next(a, c);
    }
  }

  Eigen::VectorXd grad;
  std::vector<double> td;
  const double loss = online.loss_and_gradient(states, actions, targets, sample.weights, grad, &td);
  if (hp.max_grad_norm > 0.0) {
    const double norm = grad.norm();
    if (norm > hp.max_grad_norm) grad *= hp.max_grad_norm / norm;
  }
  optimizer.step(online.parameters(), grad);
  buffer.update_priorities(sample.indices, td);
  return {true, loss};
}

std::array<double, kNumActions> AgentModel::q_values(const StateFeatures& state) const {
  const auto x = normalizer.apply(state);
  return net.forward(x);
}

PolicyFn AgentModel::policy() const {
  return [model = *this](const DecisionContext& ctx) { return model.act(*ctx.state); };
}

Normalizer fit_normalizer(const Dataset& data, const JobPool& pool, const Interval& interval, const EnvConfig& config,
                          std::uint64_t seed) {
  std::vector<StateFeatures> states;
  replay_policy(
      [&](const DecisionContext& ctx) {
        states.push_back(*ctx.state);
        return 0;
      },
      data, pool, interval, config, seed);
  Normalizer n;
  n.fit(states);
  return n;
}

TrainedAgent train_agent(Environment& env, const Normalizer& normalizer, const Hyperparameters& hp,
                         const TrainingOptions& options) {
  hp.validate();
  if (options.episodes < 0) throw std::invalid_argument("train_agent: episodes must be >= 0");
  const auto started = std::chrono::steady_clock::now();

  Rng env_rng(derive_seed(options.seed, 1));
  Rng agent_rng(derive_seed(options.seed, 2));
  Rng init_rng(derive_seed(options.seed, 3));

  TrainedAgent out;
  out.model.hp = hp;
  out.model.net = QNetwork(static_cast<int>(kFeatureCount), hp.hidden);
  if (options.warm_start != nullptr && options.warm_start->net.hidden() == hp.hidden) {
    out.model.net.parameters() = options.warm_start->net.parameters();
    out.model.normalizer = options.warm_start->normalizer;
  } else {
    out.model.net.initialize(init_rng);
    out.model.normalizer = normalizer;
  }
  QNetwork& online = out.model.net;
  const Normalizer& norm = out.model.normalizer;
  QNetwork target = online;
  Adam optimizer(online.num_parameters(), hp.learning_rate);
  PrioritizedReplay buffer(hp.buffer_capacity, hp.alpha, hp.priority_epsilon);

  auto& st = out.stats;
  double reward_sum = 0.0;
  for (long ep = 0; ep < options.episodes; ++ep) {
    const double beta =
        options.episodes > 1
            ? hp.beta_start + (hp.beta_end - hp.beta_start) * static_cast<double>(ep) / static_cast<double>(options.episodes - 1)
            : hp.beta_end;
    auto obs = env.reset(env_rng);
    bool terminal = obs.terminal;
    auto state = norm.apply(obs.state);
    while (!terminal) {
      const int action = select_action(online, state, epsilon_at(hp, st.env_steps), agent_rng);
      const auto tr = env.step(action);
      StoredTransition stored;
      stored.state = state;
      stored.action = action;
      stored.reward = tr.reward * hp.reward_scale;
      stored.terminal = tr.terminal;
      if (!tr.terminal) stored.next_state = norm.apply(tr.next_state);
      buffer.add(stored);
      ++st.env_steps;

      if (st.env_steps >= hp.learning_starts && st.env_steps % hp.train_frequency == 0) {
        const auto r = train_step(buffer, online, target, optimizer, hp, beta, agent_rng);
        if (r.performed) {
          ++st.gradient_steps;
          st.final_loss = r.loss;
        }
      }
      if (st.env_steps % hp.target_sync_frequency == 0) sync_target(online, target);
      terminal = tr.terminal;
      state = stored.next_state;
    }
    reward_sum += env.episode_reward();
    ++st.episodes;
  }

  st.mean_episode_reward = st.episodes > 0 ? reward_sum / static_cast<double>(st.episodes) : 0.0;
  st.wallclock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const auto& c = options.cost;
  const double seconds = c.use_wallclock ? st.wallclock_seconds
                                         : static_cast<double>(st.env_steps) * c.seconds_per_env_step +
                                               static_cast<double>(st.gradient_steps) * c.seconds_per_gradient_step;
  st.cost_node_hours = c.nodes_used * seconds / 3600.0;
  return out;
}

}  // namespace uemit
