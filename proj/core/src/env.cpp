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

#include "uemit/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uemit {

JobPool::JobPool(std::vector<JobRecord> jobs) : jobs_(std::move(jobs)) {
  if (jobs_.empty()) throw std::invalid_argument("JobPool: empty job set");
  std::uint64_t total = 0;
  cumulative_nodes_.reserve(jobs_.size());
  for (const auto& j : jobs_) {
    if (j.num_nodes < 1) throw std::invalid_argument("JobPool: num_nodes must be >= 1");
    total += static_cast<std::uint64_t>(j.num_nodes);
    cumulative_nodes_.push_back(total);
  }
}

const JobRecord& JobPool::sample(Rng& rng) const {
  const std::uint64_t x = rng.uniform_index(cumulative_nodes_.back());
  const auto it = std::upper_bound(cumulative_nodes_.begin(), cumulative_nodes_.end(), x);
  return jobs_[static_cast<std::size_t>(it - cumulative_nodes_.begin())];
}

std::vector<ScheduledJob> sample_job_sequence(const JobPool& pool, const Interval& span, Rng& rng,
                                              double job_scale) {
  std::vector<ScheduledJob> out;
  Timestamp t = span.begin;
  bool first = true;
  while (first || t < span.end) {
    const auto& job = pool.sample(rng);
    const auto seconds = std::max<std::int64_t>(1, std::llround(job.duration_hours * kSecondsPerHour));
    if (first) {
      t -= static_cast<Timestamp>(rng.uniform_index(static_cast<std::uint64_t>(seconds)));
      first = false;
    }
    out.push_back({t, t + seconds, static_cast<double>(job.num_nodes) * job_scale});
    t += seconds;
  }
  return out;
}

Dataset::Dataset(std::vector<NodeTimeline> timelines, Interval span) : span_(span) {
  std::sort(timelines.begin(), timelines.end(),
            [](const NodeTimeline& a, const NodeTimeline& b) { return a.node_id < b.node_id; });
  nodes_.reserve(timelines.size());
  for (auto& t : timelines) {
    auto features = compute_log_features(t, span.begin);
    nodes_.push_back({std::move(t), std::move(features)});
  }
}

Dataset Dataset::subset(const std::function<bool(const std::string&)>& keep) const {
  Dataset d;
  d.span_ = span_;
  for (const auto& n : nodes_) {
    if (keep(n.timeline.node_id)) d.nodes_.push_back(n);
  }
  return d;
}

NodeSimulator::NodeSimulator(const NodeData& node, const Interval& interval, std::vector<ScheduledJob> jobs,
                             const EnvConfig& config)
    : node_(&node),
      jobs_(std::move(jobs)),
      mitigation_hours_(config.mitigation.mitigation_cost_hours()),
      restartable_(config.mitigation.restartable),
      loss_floor_(interval.begin) {
  if (jobs_.empty()) throw std::invalid_argument("NodeSimulator: empty job sequence");
  const auto [first, last] = node.timeline.range(interval);
  cursor_ = first;
  last_ = last;
  // Work before the interval (or before the first job's start) is still at risk.
  loss_floor_ = jobs_.front().start;
}

const ScheduledJob& NodeSimulator::job_at(Timestamp t) const {
  if (job_cursor_ >= jobs_.size() || t < jobs_[job_cursor_].start) job_cursor_ = 0;
  while (job_cursor_ + 1 < jobs_.size() && t >= jobs_[job_cursor_].end) ++job_cursor_;
  return jobs_[job_cursor_];
}

JobState NodeSimulator::job_state() const {
  const Timestamp t = now();
  const auto& job = job_at(t);
  JobState s;
  s.num_nodes = job.num_nodes;
  s.job_start = std::max(job.start, loss_floor_);
  s.last_mitigation = last_mitigation_;
  s.restartable = restartable_;
  return s;
}

StateFeatures NodeSimulator::state() const {
  auto f = node_->log_features[cursor_];
  f.potential_ue_cost = job_state().potential_ue_cost(now());
  return f;
}

double NodeSimulator::charge_ue() {
  const Timestamp t = now();
  const double cost = job_state().potential_ue_cost(t);
  ue_cost_ += cost;
  ue_times_.push_back(t);
  ue_costs_.push_back(cost);
  // The job dies with the node; lost work restarts from the UE.
  loss_floor_ = t;
  last_mitigation_.reset();
  ++cursor_;
  return cost;
}

StepOutcome NodeSimulator::act(int action) {
  if (finished() || at_ue()) throw std::logic_error("NodeSimulator::act: not at a decision event");
  if (action != 0 && action != 1) throw std::invalid_argument("action must be 0 or 1");
  StepOutcome out;
  decisions_.push_back({now(), action});
  if (action == 1) {
    last_mitigation_ = now();
    ++mitigations_;
    out.reward -= mitigation_hours_;
  }
  ++cursor_;
  if (!finished() && at_ue()) {
    out.reward -= charge_ue();
    out.ue = true;
  }
  out.end = finished();
  return out;
}

double NodeSimulator::pass_ue() {
  if (!at_ue()) throw std::logic_error("NodeSimulator::pass_ue: not at a UE");
  return -charge_ue();
}

Environment::Environment(const Dataset& data, const JobPool& pool, const Interval& interval,
                         const EnvConfig& config)
    : data_(&data), pool_(&pool), interval_(interval), config_(config) {
  config_.mitigation.validate();
  const auto nodes = data.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto [first, last] = nodes[i].timeline.range(interval);
    if (last > first) eligible_.push_back(i);
  }
}

Observation Environment::reset(Rng& rng) {
  if (eligible_.empty()) throw std::invalid_argument("Environment::reset: no node has events in the split");
  node_ = eligible_[rng.uniform_index(eligible_.size())];
  auto jobs = sample_job_sequence(*pool_, interval_, rng, config_.job_scale);
  sim_.emplace(data_->nodes()[node_], interval_, std::move(jobs), config_);
  episode_reward_ = 0.0;
  Observation obs;
  if (sim_->at_ue()) {
    // UE before any decision: nothing to learn from this episode.
    episode_reward_ += sim_->pass_ue();
    terminal_ = true;
    obs.terminal = true;
    return obs;
  }
  terminal_ = false;
  obs.state = sim_->state();
  return obs;
}

Transition Environment::step(int action) {
  if (terminal_) throw std::logic_error("Environment::step after terminal");
  Transition tr;
  tr.state = sim_->state();
  tr.action = action;
  const auto outcome = sim_->act(action);
  tr.reward = outcome.reward;
  episode_reward_ += outcome.reward;
  tr.terminal = outcome.ue || outcome.end;
  if (!tr.terminal) tr.next_state = sim_->state();
  terminal_ = tr.terminal;
  return tr;
}

std::vector<ScheduledJob> evaluation_jobs(const JobPool& pool, const Interval& interval, const std::string& node_id,
                                          std::uint64_t eval_seed, double job_scale) {
  Rng rng(derive_seed(eval_seed, fnv1a64(node_id)));
  return sample_job_sequence(pool, interval, rng, job_scale);
}

ReplayResult replay_policy(const PolicyFn& policy, const Dataset& data, const JobPool& pool,
                           const Interval& interval, const EnvConfig& config, std::uint64_t eval_seed) {
  config.mitigation.validate();
  ReplayResult result;
  const auto nodes = data.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    const auto [first, last] = node.timeline.range(interval);
    if (first == last) continue;
    NodeSimulator sim(node, interval,
                      evaluation_jobs(pool, interval, node.timeline.node_id, eval_seed, config.job_scale), config);
    while (!sim.finished()) {
      if (sim.at_ue()) {
        result.cumulative_reward += sim.pass_ue();
        continue;
      }
      const auto state = sim.state();
      const DecisionContext ctx{i, &node, sim.event_index(), sim.now(), &state};
      result.cumulative_reward += sim.act(policy(ctx)).reward;
    }
    result.ue_cost += sim.ue_cost();
    result.mitigation_cost += sim.mitigation_cost();
    result.mitigations += sim.mitigations();
    result.decisions += static_cast<std::int64_t>(sim.decisions().size());
    result.ues += static_cast<std::int64_t>(sim.ue_times().size());
    result.nodes.push_back({node.timeline.node_id, sim.decisions(), sim.ue_times(), sim.ue_costs()});
  }
  return result;
}

}  // namespace uemit
