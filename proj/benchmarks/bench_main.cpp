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

#include <benchmark/benchmark.h>

#include <vector>

#include "uemit/agent/dqn.hpp"
#include "uemit/agent/network.hpp"
#include "uemit/agent/replay_buffer.hpp"
#include "uemit/env.hpp"
#include "uemit/features.hpp"
#include "uemit/policies/policies.hpp"
#include "uemit/rng.hpp"
#include "uemit/synthgen.hpp"

namespace {

uemit::QNetwork make_net(uemit::Rng& rng) {
  uemit::QNetwork net(static_cast<int>(uemit::kFeatureCount), {256, 256, 128, 64});
  net.initialize(rng);
  return net;
}

void BM_Forward(benchmark::State& state) {
  uemit::Rng rng(1);
  const auto net = make_net(rng);
  std::vector<double> x(uemit::kFeatureCount, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_Forward);

void BM_LossAndGradient(benchmark::State& state) {
  uemit::Rng rng(2);
  const auto net = make_net(rng);
  const auto batch = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(uemit::kFeatureCount), batch);
  std::vector<int> actions(static_cast<std::size_t>(batch));
  std::vector<double> targets(actions.size(), 0.5), weights(actions.size(), 1.0);
  for (std::size_t i = 0; i < actions.size(); ++i) actions[i] = static_cast<int>(i % 2);
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(net.loss_and_gradient(x, actions, targets, weights, grad, nullptr));
}
BENCHMARK(BM_LossAndGradient)->Arg(32)->Arg(64)->Arg(128);

void BM_TrainStep(benchmark::State& state) {
  uemit::Rng rng(3);
  auto online = make_net(rng);
  auto target = online;
  uemit::Hyperparameters hp;
  uemit::Adam adam(online.num_parameters(), hp.learning_rate);
  uemit::PrioritizedReplay buffer(4096, hp.alpha);
  for (int i = 0; i < 4096; ++i) {
    uemit::StoredTransition t;
    for (auto& v : t.state) v = rng.uniform(-1.0, 1.0);
    t.next_state = t.state;
    t.action = i % 2;
    t.reward = -rng.uniform(0.0, 1.0);
    buffer.add(t);
  }
  for (auto _ : state) benchmark::DoNotOptimize(uemit::train_step(buffer, online, target, adam, hp, 0.5, rng));
}
BENCHMARK(BM_TrainStep);

void BM_SumTreeSample(benchmark::State& state) {
  uemit::Rng rng(4);
  uemit::PrioritizedReplay buffer(static_cast<std::size_t>(state.range(0)), 0.6);
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    buffer.add(uemit::StoredTransition{});
    buffer.set_priority(static_cast<std::size_t>(i), rng.uniform(0.01, 5.0));
  }
  for (auto _ : state) benchmark::DoNotOptimize(buffer.sample(64, 0.5, rng));
}
BENCHMARK(BM_SumTreeSample)->Arg(1 << 12)->Arg(100000);

uemit::SynthData synth_small() {
  uemit::SynthConfig cfg;
  cfg.n_nodes = 10;
  cfg.span_months = 1.0;
  cfg.ue_count_target = 4;
  return uemit::generate(cfg);
}

void BM_LogFeatures(benchmark::State& state) {
  const auto data = synth_small();
  const auto timelines = uemit::build_timelines(data.events, data.retirements, {});
  std::int64_t events = 0;
  for (auto _ : state) {
    for (const auto& t : timelines) {
      benchmark::DoNotOptimize(uemit::compute_log_features(t, data.span.begin));
      events += static_cast<std::int64_t>(t.events.size());
    }
  }
  state.SetItemsProcessed(events);
}
BENCHMARK(BM_LogFeatures);

void BM_ReplayAlways(benchmark::State& state) {
  const auto data = synth_small();
  const uemit::Dataset dataset(uemit::build_timelines(data.events, data.retirements, {}), data.span);
  const uemit::JobPool pool(data.jobs);
  const uemit::EnvConfig env;
  for (auto _ : state)
    benchmark::DoNotOptimize(uemit::replay_policy(uemit::always_policy(), dataset, pool, data.span, env, 1));
}
BENCHMARK(BM_ReplayAlways);

}  // namespace
BENCHMARK_MAIN();
