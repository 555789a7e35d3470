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
#include <span>
#include <string>
#include <vector>

#include "uemit/features.hpp"
#include "uemit/logs.hpp"
#include "uemit/rng.hpp"
#include "uemit/time.hpp"

namespace uemit {

struct EnvConfig {
  MitigationPolicyConfig mitigation;
  /// Multiplies every job's node count (job-size sensitivity); durations unchanged.
  double job_scale = 1.0;
};

/// Job log as a sampling pool; draws are weighted by num_nodes.
class JobPool {
 public:
  explicit JobPool(std::vector<JobRecord> jobs);

  const JobRecord& sample(Rng& rng) const;
  std::span<const JobRecord> jobs() const { return jobs_; }

 private:
  std::vector<JobRecord> jobs_;
  std::vector<std::uint64_t> cumulative_nodes_;
};

/// A job placed on one node's timeline.
struct ScheduledJob {
  Timestamp start = 0;
  Timestamp end = 0;
  double num_nodes = 1.0;
};

/// Jobs drawn from `pool` and placed back-to-back until `span` is covered. The
/// first job starts at a random phase before span.begin, so a job is already in
/// progress at the start of the span.
std::vector<ScheduledJob> sample_job_sequence(const JobPool& pool, const Interval& span, Rng& rng,
                                              double job_scale = 1.0);

struct NodeData {
  NodeTimeline timeline;
  std::vector<StateFeatures> log_features;  // potential_ue_cost == 0
};

/// Timelines of all nodes with their precomputed log features.
class Dataset {
 public:
  Dataset(std::vector<NodeTimeline> timelines, Interval span);

  std::span<const NodeData> nodes() const { return nodes_; }
  const Interval& span() const { return span_; }

  /// Nodes for which `keep(node_id)` holds.
  Dataset subset(const std::function<bool(const std::string&)>& keep) const;

 private:
  Dataset() = default;
  std::vector<NodeData> nodes_;
  Interval span_;
};

/// Result of acting at one decision event.
struct StepOutcome {
  double reward = 0.0;  // node-hours, <= 0
  bool ue = false;      // the next event was a UE (and has been charged)
  bool end = false;     // no events left in the interval
};

struct Decision {
  Timestamp time = 0;
  int action = 0;
};

/// Walks one node's events inside an interval under a fixed job sequence and
/// does all reward and cost bookkeeping. Used both by the training environment
/// (which stops at the first UE) and by policy replay (which continues).
class NodeSimulator {
 public:
  NodeSimulator(const NodeData& node, const Interval& interval, std::vector<ScheduledJob> jobs,
                const EnvConfig& config);

  bool finished() const { return cursor_ >= last_; }
  bool at_ue() const { return !finished() && node_->timeline.events[cursor_].ue; }
  std::size_t event_index() const { return cursor_; }
  Timestamp now() const { return node_->timeline.events[cursor_].timestamp; }

  /// Job state at the current event.
  JobState job_state() const;
  /// Observation at the current event.
  StateFeatures state() const;

  /// Applies `action` at the current (non-UE) event and moves to the next
  /// event. The reward follows R = -a * mitigation_cost - UE_occurred * UE_cost;
  /// a UE at the next event is charged at its own timestamp and consumed.
  StepOutcome act(int action);

  /// Charges the UE at the current event without a preceding decision and
  /// moves past it. Returns the (negative) reward.
  double pass_ue();

  double ue_cost() const { return ue_cost_; }
  double mitigation_cost() const { return static_cast<double>(mitigations_) * mitigation_hours_; }
  std::int64_t mitigations() const { return mitigations_; }
  const std::vector<Decision>& decisions() const { return decisions_; }
  const std::vector<Timestamp>& ue_times() const { return ue_times_; }
  const std::vector<double>& ue_costs() const { return ue_costs_; }

 private:
  const ScheduledJob& job_at(Timestamp t) const;
  double charge_ue();

  const NodeData* node_;
  std::vector<ScheduledJob> jobs_;
  double mitigation_hours_;
  bool restartable_;
  std::size_t cursor_;
  std::size_t last_;
  mutable std::size_t job_cursor_ = 0;
  std::optional<Timestamp> last_mitigation_;
  Timestamp loss_floor_;
  double ue_cost_ = 0.0;
  std::int64_t mitigations_ = 0;
  std::vector<Decision> decisions_;
  std::vector<Timestamp> ue_times_;
  std::vector<double> ue_costs_;
};

struct Observation {
  StateFeatures state;
  bool terminal = false;
};

struct Transition {
  StateFeatures state;
  int action = 0;
  double reward = 0.0;
  StateFeatures next_state;  // meaningless when terminal
  bool terminal = false;
};

/// Training environment: each episode is one uniformly chosen node, from the
/// first to the last of its events inside `interval`, ending early at a UE.
class Environment {
 public:
  Environment(const Dataset& data, const JobPool& pool, const Interval& interval, const EnvConfig& config);

  /// Throws std::invalid_argument when no node has an event in the interval.
  Observation reset(Rng& rng);
  /// Throws std::logic_error when called on a terminal episode.
  Transition step(int action);

  bool terminal() const { return terminal_; }
  std::size_t eligible_nodes() const { return eligible_.size(); }
  std::size_t current_node() const { return node_; }
  const NodeSimulator& simulator() const { return *sim_; }
  double episode_reward() const { return episode_reward_; }

 private:
  const Dataset* data_;
  const JobPool* pool_;
  Interval interval_;
  EnvConfig config_;
  std::vector<std::size_t> eligible_;
  std::size_t node_ = 0;
  std::optional<NodeSimulator> sim_;
  bool terminal_ = true;
  double episode_reward_ = 0.0;
};

/// What a policy sees at a decision event.
struct DecisionContext {
  std::size_t node = 0;  // index into Dataset::nodes()
  const NodeData* data = nullptr;
  std::size_t event_index = 0;
  Timestamp time = 0;
  const StateFeatures* state = nullptr;
};

using PolicyFn = std::function<int(const DecisionContext&)>;

struct NodeReplay {
  std::string node_id;
  std::vector<Decision> decisions;
  std::vector<Timestamp> ue_times;
  std::vector<double> ue_costs;
};

struct ReplayResult {
  double ue_cost = 0.0;          // node-hours
  double mitigation_cost = 0.0;  // node-hours, actions only
  std::int64_t mitigations = 0;
  std::int64_t decisions = 0;
  std::int64_t ues = 0;
  double cumulative_reward = 0.0;
  std::vector<NodeReplay> nodes;

  double total_cost() const { return ue_cost + mitigation_cost; }
};

/// Job sequence used for `node_id` during evaluation; identical for every
/// policy scored with the same seed.
std::vector<ScheduledJob> evaluation_jobs(const JobPool& pool, const Interval& interval, const std::string& node_id,
                                          std::uint64_t eval_seed, double job_scale);

/// Deterministic accounting of every node's full timeline inside `interval`:
/// each mitigation costs mitigation_cost and each UE its cost at the UE time.
ReplayResult replay_policy(const PolicyFn& policy, const Dataset& data, const JobPool& pool,
                           const Interval& interval, const EnvConfig& config, std::uint64_t eval_seed);

}  // namespace uemit
