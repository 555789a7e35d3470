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

#include "uemit/eval/crossval.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace uemit {

namespace {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

std::vector<std::string> CostReport::policies() const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.policy) == out.end()) out.push_back(r.policy);
  }
  return out;
}

const CostRow* CostReport::find(const std::string& policy, int split) const {
  for (const auto& r : rows) {
    if (r.policy == policy && r.split == split) return &r;
  }
  return nullptr;
}

CostRow CostReport::total(const std::string& policy) const {
  CostRow t;
  t.policy = policy;
  for (const auto& r : rows) {
    if (r.policy != policy) continue;
    t.ue_cost += r.ue_cost;
    t.mitigation_cost += r.mitigation_cost;
    t.mitigations += r.mitigations;
    t.metrics += r.metrics;
    t.training_cost += r.training_cost;
    t.cumulative_reward += r.cumulative_reward;
  }
  return t;
}

std::string CostReport::to_csv() const {
  std::ostringstream out;
  out << "policy,split,ue_cost,mitigation_cost,mitigations,tp,fn,fp,tn\n";
  auto line = [&](const CostRow& r, const std::string& split) {
    out << r.policy << ',' << split << ',' << num(r.ue_cost) << ',' << num(r.mitigation_cost) << ',' << r.mitigations
        << ',' << r.metrics.tp << ',' << r.metrics.fn << ',' << r.metrics.fp << ',' << r.metrics.tn << '\n';
  };
  for (const auto& r : rows) line(r, std::to_string(r.split));
  for (const auto& p : policies()) line(total(p), "all");
  return out.str();
}

std::string CostReport::metrics_csv() const {
  std::ostringstream out;
  out << "policy,tp,fn,fp,tn,recall,precision\n";
  for (const auto& p : policies()) {
    const auto t = total(p);
    out << p << ',' << t.metrics.tp << ',' << t.metrics.fn << ',' << t.metrics.fp << ',' << t.metrics.tn << ','
        << opt_num(t.metrics.recall()) << ',' << opt_num(t.metrics.precision()) << '\n';
  }
  return out.str();
}

std::string cost_breakdown_csv(const std::vector<CostReport>& reports) {
  std::ostringstream out;
  out << "mitigation_cost_minutes,policy,ue_cost,mitigation_cost,total\n";
  for (const auto& rep : reports) {
    for (const auto& p : rep.policies()) {
      const auto t = rep.total(p);
      out << num(rep.mitigation_cost_minutes) << ',' << p << ',' << num(t.ue_cost) << ',' << num(t.mitigation_cost)
          << ',' << num(t.total()) << '\n';
    }
  }
  return out.str();
}

CostRow make_row(const std::string& policy, int split, const ReplayResult& replay, const EnvConfig& env,
                 double training_cost) {
  CostRow r;
  r.policy = policy;
  r.split = split;
  r.ue_cost = replay.ue_cost;
  r.mitigation_cost = replay.mitigation_cost + training_cost;
  r.mitigations = replay.mitigations;
  r.metrics = classical_metrics(replay, env.mitigation.mitigation_cost_minutes * kSecondsPerMinute);
  r.training_cost = training_cost;
  r.cumulative_reward = replay.cumulative_reward;
  return r;
}

CrossvalResult run_crossval(const Dataset& data, const JobPool& pool, const CrossvalConfig& config) {
  config.env.mitigation.validate();
  CrossvalResult result;
  result.plan = build_splits(data.span());
  result.report.mitigation_cost_minutes = config.env.mitigation.mitigation_cost_minutes;
  auto log = [&](const std::string& s) {
    if (config.log) config.log(s);
  };

  std::optional<AgentModel> previous;
  for (const auto& split : result.plan.splits) {
    if (!config.splits.empty() &&
        std::find(config.splits.begin(), config.splits.end(), split.index) == config.splits.end())
      continue;
    SplitArtifacts art;
    art.split = split;
    const auto& test = split.test;
    auto evaluate = [&](const PolicyFn& policy) {
      return replay_policy(policy, data, pool, test, config.env, config.eval_seed);
    };
    auto& rows = result.report.rows;
    rows.push_back(make_row("never", split.index, evaluate(never_policy()), config.env));
    rows.push_back(make_row("always", split.index, evaluate(always_policy()), config.env));
    rows.push_back(make_row("oracle", split.index, evaluate(oracle_policy(data, test)), config.env));

    if (config.run_rf) {
      const bool validation_mode = config.threshold_mode == ThresholdMode::validation;
      const Interval fit{split.train.begin, validation_mode ? split.train.end : split.validation.end};
      auto forest_params = config.forest;
      forest_params.seed = derive_seed(config.forest.seed, static_cast<std::uint64_t>(split.index));
      art.forest = train_rf(rf_training_set(data, fit), forest_params);
      if (art.forest->degenerate()) log("split " + std::to_string(split.index) + ": forest training data has a single class");
      const Interval tune = validation_mode ? split.validation : test;
      const auto tune_probs = predict_all(*art.forest, data, tune);
      art.threshold = optimal_threshold(tune_probs, data, pool, tune, config.env, config.eval_seed);
      const auto probs = predict_all(*art.forest, data, test);
      auto add_rf = [&](const std::string& label, double theta) {
        auto row = make_row(label, split.index, evaluate(sc20_rf_policy(probs, theta)), config.env);
        row.threshold = theta;
        rows.push_back(std::move(row));
      };
      add_rf("sc20_rf", art.threshold->optimal.threshold);
      add_rf("sc20_rf_2pct", art.threshold->offset_2pct.threshold);
      add_rf("sc20_rf_5pct", art.threshold->offset_5pct.threshold);
      rows.push_back(make_row("myopic_rf", split.index, evaluate(myopic_rf_policy(probs, config.env.mitigation)), config.env));
    }

    if (config.run_rl && config.pretrained.count(split.index)) {
      const auto& pre = config.pretrained.at(split.index);
      rows.push_back(make_row("rl", split.index, evaluate(pre.model.policy()), config.env, pre.training_cost));
      previous = pre.model;
    } else if (config.run_rl) {
      auto search = config.search;
      search.seed = derive_seed(config.search.seed, static_cast<std::uint64_t>(split.index));
      art.search = hyperparameter_search(data, pool, split, config.env, search, config.eval_seed,
                                         previous ? &*previous : nullptr);
      rows.push_back(make_row("rl", split.index, evaluate(art.search->best.policy()), config.env,
                              art.search->total_training_cost));
      previous = art.search->best;
    }
    log("split " + std::to_string(split.index) + " done");
    result.splits.push_back(std::move(art));
  }
  return result;
}

}  // namespace uemit
