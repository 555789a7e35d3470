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

#include "uemit/eval/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace uemit {

void SearchSpace::validate() const {
  if (!(learning_rate_min > 0.0 && learning_rate_min <= learning_rate_max))
    throw std::invalid_argument("search space: bad learning rate range");
  if (gammas.empty() || batch_sizes.empty()) throw std::invalid_argument("search space: empty grid");
  if (!(sync_min > 0 && sync_min <= sync_max)) throw std::invalid_argument("search space: bad sync range");
  if (!(alpha_min >= 0.0 && alpha_min <= alpha_max)) throw std::invalid_argument("search space: bad alpha range");
  if (!(beta_start_min >= 0.0 && beta_start_min <= beta_start_max))
    throw std::invalid_argument("search space: bad beta range");
}

namespace {

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(rng.uniform(std::log(lo), std::log(hi))); }

template <typename T>
T grid_step(const std::vector<T>& grid, T current, Rng& rng) {
  // Nearest grid index, then a step of -1, 0 or +1 clamped to the grid.
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(static_cast<double>(grid[i] - current)) < std::abs(static_cast<double>(grid[best] - current))) best = i;
  }
  const auto step = static_cast<long>(rng.uniform_index(3)) - 1;
  const long idx = std::clamp(static_cast<long>(best) + step, 0L, static_cast<long>(grid.size()) - 1);
  return grid[static_cast<std::size_t>(idx)];
}

double scale2(Rng& rng) { return std::exp2(rng.uniform(-1.0, 1.0)); }

}  // namespace

Hyperparameters sample_hyperparameters(const SearchSpace& space, const Hyperparameters& base, Rng& rng) {
  space.validate();
  Hyperparameters hp = base;
  hp.learning_rate = log_uniform(rng, space.learning_rate_min, space.learning_rate_max);
  hp.gamma = space.gammas[rng.uniform_index(space.gammas.size())];
  hp.batch_size = space.batch_sizes[rng.uniform_index(space.batch_sizes.size())];
  hp.target_sync_frequency = static_cast<int>(
      std::lround(log_uniform(rng, static_cast<double>(space.sync_min), static_cast<double>(space.sync_max))));
  hp.alpha = rng.uniform(space.alpha_min, space.alpha_max);
  hp.beta_start = rng.uniform(space.beta_start_min, space.beta_start_max);
  return hp;
}

Hyperparameters perturb_hyperparameters(const SearchSpace& space, const Hyperparameters& center, Rng& rng) {
  space.validate();
  Hyperparameters hp = center;
  hp.learning_rate = center.learning_rate * scale2(rng);
  hp.gamma = grid_step(space.gammas, center.gamma, rng);
  hp.batch_size = grid_step(space.batch_sizes, center.batch_size, rng);
  hp.target_sync_frequency =
      std::max(1, static_cast<int>(std::lround(static_cast<double>(center.target_sync_frequency) * scale2(rng))));
  hp.alpha = std::clamp(center.alpha * scale2(rng), 0.0, 1.0);
  hp.beta_start = std::clamp(center.beta_start * scale2(rng), 0.0, 1.0);
  return hp;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

namespace {

bool has_ue(const Dataset& data, const Interval& interval) {
  for (const auto& node : data.nodes()) {
    const auto [first, last] = node.timeline.range(interval);
    for (std::size_t i = first; i < last; ++i) {
      if (node.timeline.events[i].ue) return true;
    }
  }
  return false;
}

struct Trained {
  CandidateResult result;
  AgentModel model;
};

}  // namespace

SearchResult hyperparameter_search(const Dataset& data, const JobPool& pool, const Split& split,
                                   const EnvConfig& env_config, const SearchConfig& config,
                                   std::uint64_t eval_seed, const AgentModel* warm_start) {
  if (config.n_first < 1 || config.n_second < 0) throw std::invalid_argument("search: n_first must be >= 1");
  config.space.validate();
  config.base.validate();

  const Normalizer normalizer = fit_normalizer(data, pool, split.train, env_config, eval_seed);
  std::mutex log_mutex;
  auto log = [&](const std::string& line) {
    if (!config.log) return;
    std::lock_guard lock(log_mutex);
    config.log(line);
  };

  auto train_one = [&](int round, int index, const Hyperparameters& hp, bool warm) {
    Environment env(data, pool, split.train, env_config);
    TrainingOptions opts;
    opts.episodes = config.episodes;
    opts.seed = derive_seed(config.seed, static_cast<std::uint64_t>(round) * 1000003ULL + static_cast<std::uint64_t>(index));
    opts.warm_start = warm ? warm_start : nullptr;
    opts.cost = config.cost;
    auto trained = train_agent(env, normalizer, hp, opts);
    const auto policy = trained.model.policy();
    const auto train_replay = replay_policy(policy, data, pool, split.train, env_config, eval_seed);
    const auto val_replay = replay_policy(policy, data, pool, split.validation, env_config, eval_seed);

    Trained t;
    t.result.round = round;
    t.result.index = index;
    t.result.warm_started = opts.warm_start != nullptr;
    t.result.hp = hp;
    t.result.train_cost = train_replay.total_cost();
    t.result.validation_cost = val_replay.total_cost();
    t.result.stats = trained.stats;
    if (!config.cost.use_wallclock) {
      // Scoring replays count as environment work.
      const double steps = static_cast<double>(train_replay.decisions + val_replay.decisions);
      t.result.stats.cost_node_hours += config.cost.nodes_used * steps * config.cost.seconds_per_env_step / 3600.0;
    }
    t.model = std::move(trained.model);
    std::ostringstream msg;
    msg << "split " << split.index << " round " << round << " candidate " << index << (t.result.warm_started ? " (warm)" : "")
        << ": train_cost=" << t.result.train_cost << " validation_cost=" << t.result.validation_cost
        << " steps=" << t.result.stats.env_steps;
    log(msg.str());
    return t;
  };

  auto run_round = [&](int round, const std::vector<Hyperparameters>& hps, const std::vector<bool>& warm) {
    std::vector<std::optional<Trained>> out(hps.size());
    parallel_for(hps.size(), config.jobs, [&](std::size_t i) { out[i] = train_one(round, static_cast<int>(i), hps[i], warm[i]); });
    std::vector<Trained> done;
    for (auto& o : out) done.push_back(std::move(*o));
    return done;
  };

  SearchResult result;
  Rng sampler(derive_seed(config.seed, 11));
  std::vector<Hyperparameters> first(static_cast<std::size_t>(config.n_first));
  std::vector<bool> warm(first.size(), false);
  for (std::size_t i = 0; i < first.size(); ++i) {
    first[i] = config.n_first == 1 ? config.base : sample_hyperparameters(config.space, config.base, sampler);
    const double f = config.warm_fraction;
    warm[i] = warm_start != nullptr &&
              std::floor(static_cast<double>(i + 1) * f) > std::floor(static_cast<double>(i) * f);
  }
  auto round1 = run_round(1, first, warm);

  std::size_t winner = 0;
  for (std::size_t i = 1; i < round1.size(); ++i) {
    if (round1[i].result.train_cost < round1[winner].result.train_cost) winner = i;
  }

  Rng perturber(derive_seed(config.seed, 12));
  std::vector<Hyperparameters> second(static_cast<std::size_t>(config.n_second));
  for (auto& hp : second) hp = perturb_hyperparameters(config.space, round1[winner].result.hp, perturber);
  auto round2 = run_round(2, second, std::vector<bool>(second.size(), false));

  result.selected_on_training = !has_ue(data, split.validation);
  auto score = [&](const CandidateResult& c) { return result.selected_on_training ? c.train_cost : c.validation_cost; };
  Trained* best = &round1[winner];
  for (auto& c : round2) {
    if (score(c.result) < score(best->result)) best = &c;
  }

  for (const auto& group : {&round1, &round2}) {
    for (const auto& c : *group) {
      result.candidates.push_back(c.result);
      result.total_training_cost += c.result.stats.cost_node_hours;
      result.total_wallclock_seconds += c.result.stats.wallclock_seconds;
    }
  }
  result.best_candidate = best->result;
  result.best = std::move(best->model);
  return result;
}

}  // namespace uemit
