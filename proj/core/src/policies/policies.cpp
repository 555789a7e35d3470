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

#include "uemit/policies/policies.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace uemit {

void PolicySpec::validate() const {
  if (kind == PolicyKind::sc20_rf && !(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("sc20_rf threshold must lie in [0, 1]");
  if (kind == PolicyKind::rl && checkpoint.empty()) throw std::invalid_argument("rl policy needs a checkpoint");
}

std::string PolicySpec::label() const {
  switch (kind) {
    case PolicyKind::never: return "never";
    case PolicyKind::always: return "always";
    case PolicyKind::oracle: return "oracle";
    case PolicyKind::sc20_rf: return "sc20_rf";
    case PolicyKind::sc20_rf_offset: return "sc20_rf_" + std::to_string(static_cast<int>(std::lround(delta * 100))) + "pct";
    case PolicyKind::myopic_rf: return "myopic_rf";
    case PolicyKind::rl: return "rl";
  }
  return "unknown";
}

PolicyFn never_policy() {
  return [](const DecisionContext&) { return 0; };
}

PolicyFn always_policy() {
  return [](const DecisionContext&) { return 1; };
}

std::vector<std::vector<std::size_t>> oracle_decisions(const Dataset& data, const Interval& interval) {
  const auto nodes = data.nodes();
  std::vector<std::vector<std::size_t>> out(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto& events = nodes[n].timeline.events;
    const auto [first, last] = nodes[n].timeline.range(interval);
    for (std::size_t i = first + 1; i < last; ++i) {
      if (events[i].ue && !events[i - 1].ue) out[n].push_back(i - 1);
    }
  }
  return out;
}

PolicyFn oracle_policy(const Dataset& data, const Interval& interval) {
  auto marks = std::make_shared<std::vector<std::vector<std::size_t>>>(oracle_decisions(data, interval));
  return [marks](const DecisionContext& ctx) {
    const auto& m = (*marks)[ctx.node];
    return std::binary_search(m.begin(), m.end(), ctx.event_index) ? 1 : 0;
  };
}

std::array<double, kLogFeatureCount> rf_features(const StateFeatures& state) {
  const auto all = state.to_array();
  std::array<double, kLogFeatureCount> out{};
  std::copy_n(all.begin(), kLogFeatureCount, out.begin());
  return out;
}

LabeledSamples rf_training_set(const Dataset& data, const Interval& interval, std::int64_t window_seconds) {
  LabeledSamples s;
  s.n_features = kLogFeatureCount;
  for (const auto& node : data.nodes()) {
    const auto& events = node.timeline.events;
    const auto [first, last] = node.timeline.range(interval);
    std::size_t next_ue = first;
    for (std::size_t i = first; i < last; ++i) {
      if (events[i].ue) continue;
      if (next_ue <= i) {
        next_ue = i + 1;
        while (next_ue < last && !events[next_ue].ue) ++next_ue;
      }
      const bool label = next_ue < last && events[next_ue].timestamp <= events[i].timestamp + window_seconds;
      s.add(rf_features(node.log_features[i]), label ? 1 : 0);
    }
  }
  return s;
}

ProbabilityTable predict_all(const RandomForest& forest, const Dataset& data, const Interval& interval) {
  const auto nodes = data.nodes();
  ProbabilityTable table(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto& node = nodes[n];
    table[n].assign(node.timeline.events.size(), 0.0);
    const auto [first, last] = node.timeline.range(interval);
    for (std::size_t i = first; i < last; ++i) table[n][i] = forest.predict_proba(rf_features(node.log_features[i]));
  }
  return table;
}

PolicyFn sc20_rf_policy(const RandomForest& forest, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("sc20_rf threshold must lie in [0, 1]");
  auto f = std::make_shared<RandomForest>(forest);
  return [f, threshold](const DecisionContext& ctx) {
    return f->predict_proba(rf_features(*ctx.state)) > threshold ? 1 : 0;
  };
}

PolicyFn sc20_rf_policy(const ProbabilityTable& probabilities, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("sc20_rf threshold must lie in [0, 1]");
  return [&probabilities, threshold](const DecisionContext& ctx) {
    return probabilities[ctx.node][ctx.event_index] > threshold ? 1 : 0;
  };
}

PolicyFn myopic_rf_policy(const RandomForest& forest, const MitigationPolicyConfig& mitigation) {
  auto f = std::make_shared<RandomForest>(forest);
  const double m = mitigation.mitigation_cost_hours();
  return [f, m](const DecisionContext& ctx) {
    return f->predict_proba(rf_features(*ctx.state)) * ctx.state->potential_ue_cost > m ? 1 : 0;
  };
}

PolicyFn myopic_rf_policy(const ProbabilityTable& probabilities, const MitigationPolicyConfig& mitigation) {
  const double m = mitigation.mitigation_cost_hours();
  return [&probabilities, m](const DecisionContext& ctx) {
    return probabilities[ctx.node][ctx.event_index] * ctx.state->potential_ue_cost > m ? 1 : 0;
  };
}

std::vector<double> default_threshold_grid() {
  std::vector<double> g(101);
  for (int i = 0; i <= 100; ++i) g[static_cast<std::size_t>(i)] = i / 100.0;
  return g;
}

ThresholdSearchResult optimal_threshold(const ProbabilityTable& probabilities, const Dataset& data,
                                        const JobPool& pool, const Interval& interval, const EnvConfig& config,
                                        std::uint64_t eval_seed, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("optimal_threshold: empty grid");
  auto cost_at = [&](double theta) {
    return replay_policy(sc20_rf_policy(probabilities, theta), data, pool, interval, config, eval_seed).total_cost();
  };
  ThresholdSearchResult r;
  for (double theta : grid) r.curve.push_back({theta, cost_at(theta)});
  auto sorted = r.curve;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.threshold < b.threshold; });
  r.optimal = sorted.front();
  for (const auto& c : sorted) {
    if (c.cost < r.optimal.cost) r.optimal = c;
  }
  auto offset = [&](double delta) {
    const double up = std::min(1.0, r.optimal.threshold + delta);
    const double down = std::max(0.0, r.optimal.threshold - delta);
    const ThresholdChoice a{up, cost_at(up)}, b{down, cost_at(down)};
    return b.cost > a.cost ? b : a;
  };
  r.offset_2pct = offset(0.02);
  r.offset_5pct = offset(0.05);
  return r;
}

}  // namespace uemit
