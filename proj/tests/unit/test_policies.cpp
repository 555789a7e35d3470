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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support/brute_force.hpp"
#include "support/builders.hpp"
#include "uemit/env.hpp"
#include "uemit/policies/forest.hpp"
#include "uemit/policies/policies.hpp"

using namespace uemit;
using namespace uemit::test;

namespace {

constexpr Timestamp H = kSecondsPerHour;

std::vector<std::pair<Timestamp, bool>> random_events(Rng& rng, std::size_t n, double ue_rate) {
  std::vector<std::pair<Timestamp, bool>> ev;
  Timestamp t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t += 60 + static_cast<Timestamp>(rng.uniform_index(8 * H));
    ev.push_back({t, rng.bernoulli(ue_rate)});
  }
  return ev;
}

// Positions of the mitigations a policy takes on each node.
std::vector<std::set<std::size_t>> mitigated(const PolicyFn& policy, const Dataset& data, const JobPool& pool,
                                             const Interval& iv) {
  std::vector<std::set<std::size_t>> out(data.nodes().size());
  auto spy = [&](const DecisionContext& ctx) {
    const int a = policy(ctx);
    if (a == 1) out[ctx.node].insert(ctx.event_index);
    return a;
  };
  replay_policy(spy, data, pool, iv, EnvConfig{}, 1);
  return out;
}

LabeledSamples separable(Rng& rng, std::size_t n) {
  LabeledSamples s;
  s.n_features = 3;
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = rng.uniform();
    const std::array<double, 3> row{x0, rng.uniform(), rng.uniform()};
    s.add(row, x0 > 0.6 ? 1 : 0);
  }
  return s;
}

}  // namespace

TEST_SUITE("policies") {
  TEST_CASE("never and always") {
    const Interval iv{0, 100 * H};
    const Dataset data({timeline("n", {{H, false}, {2 * H, false}, {3 * H, true}, {4 * H, false}})}, iv);
    const auto pool = single_job_pool(50.0, 4);
    const auto never = replay_policy(never_policy(), data, pool, iv, EnvConfig{}, 1);
    const auto always = replay_policy(always_policy(), data, pool, iv, EnvConfig{}, 1);
    CHECK(never.mitigations == 0);
    CHECK(never.mitigation_cost == 0.0);
    CHECK(always.mitigations == 3);
    CHECK(always.decisions == 3);
    CHECK(always.mitigation_cost == doctest::Approx(3 * 2.0 / 60.0));
    // Never: 4 nodes since the job start; Always: 4 nodes x 1 h since the mitigation at 2 h.
    const auto jobs = evaluation_jobs(pool, iv, "n", 1, 1.0);
    CHECK(never.ue_cost == doctest::Approx(4.0 * to_hours(3 * H - jobs.front().start)));
    CHECK(always.ue_cost == doctest::Approx(4.0));
  }

  TEST_CASE("oracle marks the event before each UE") {
    const Interval iv{0, 100 * H};
    {
      const Dataset data({timeline("n", {{H, false}, {2 * H, false}, {3 * H, true}})}, iv);
      CHECK(oracle_decisions(data, iv) == std::vector<std::vector<std::size_t>>{{1}});
      const auto r = replay_policy(oracle_policy(data, iv), data, single_job_pool(50.0, 4), iv, EnvConfig{}, 1);
      CHECK(r.mitigations == 1);
      CHECK(r.ue_cost == doctest::Approx(4.0));
    }
    {
      const Dataset data({timeline("n", {{H, true}, {2 * H, false}})}, iv);
      CHECK(oracle_decisions(data, iv) == std::vector<std::vector<std::size_t>>{{}});
    }
    {
      const Dataset data(
          {timeline("n", {{H, false}, {2 * H, true}, {3 * H, true}, {4 * H, false}, {5 * H, false}, {6 * H, true}})},
          iv);
      CHECK(oracle_decisions(data, iv) == std::vector<std::vector<std::size_t>>{{0, 4}});
    }
    {
      // The preceding event lies outside the interval.
      const Dataset data({timeline("n", {{H, false}, {3 * H, true}})}, iv);
      const Interval late{2 * H, 100 * H};
      CHECK(oracle_decisions(data, late) == std::vector<std::vector<std::size_t>>{{}});
    }
  }

  TEST_CASE("oracle UE cost is minimal over every action sequence and equals always") {
    Rng rng(21);
    const JobPool pool({JobRecord{"a", 0, 4.0, 2}, JobRecord{"b", 0, 11.0, 5}});
    for (int trial = 0; trial < 40; ++trial) {
      const auto ev = random_events(rng, 2 + rng.uniform_index(9), 0.3);
      const Interval iv{0, ev.back().first + 1};
      const Dataset data({timeline("n", ev)}, iv);
      const auto jobs = evaluation_jobs(pool, iv, "n", 9, 1.0);
      std::size_t decisions = 0;
      for (const auto& e : data.nodes()[0].timeline.events) decisions += !e.ue;
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t mask = 0; mask < (1u << decisions); ++mask) {
        std::vector<int> actions;
        for (std::size_t k = 0; k < decisions; ++k) actions.push_back(static_cast<int>(mask >> k & 1u));
        best = std::min(best, brute_force_cost(data.nodes()[0].timeline, iv, jobs, EnvConfig{}.mitigation, actions).ue_cost);
      }
      const auto oracle = replay_policy(oracle_policy(data, iv), data, pool, iv, EnvConfig{}, 9);
      const auto always = replay_policy(always_policy(), data, pool, iv, EnvConfig{}, 9);
      CHECK(oracle.ue_cost == doctest::Approx(best).epsilon(1e-12));
      CHECK(always.ue_cost == doctest::Approx(oracle.ue_cost).epsilon(1e-12));
      CHECK(oracle.mitigations <= always.mitigations);
    }
  }

  TEST_CASE("training labels mark a UE within the window") {
    Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
      const auto ev = random_events(rng, 5 + rng.uniform_index(30), 0.15);
      const Interval iv{ev.front().first + static_cast<Timestamp>(rng.uniform_index(20 * H)),
                        ev.back().first - static_cast<Timestamp>(rng.uniform_index(20 * H))};
      if (iv.end <= iv.begin) continue;
      const Dataset data({timeline("n", ev)}, {0, ev.back().first + 1});
      const std::int64_t window = 1 + static_cast<std::int64_t>(rng.uniform_index(30 * H));
      const auto s = rf_training_set(data, iv, window);
      const auto& events = data.nodes()[0].timeline.events;
      std::vector<int> want;
      for (const auto& e : events) {
        if (e.ue || !iv.contains(e.timestamp)) continue;
        bool hit = false;
        for (const auto& u : events)
          hit |= u.ue && iv.contains(u.timestamp) && u.timestamp > e.timestamp && u.timestamp <= e.timestamp + window;
        want.push_back(hit ? 1 : 0);
      }
      CHECK(s.y == want);
      CHECK(s.n_features == kLogFeatureCount);
    }
  }

  TEST_CASE("forest separates separable data") {
    Rng rng(23);
    const auto train = separable(rng, 600);
    ForestParams p;
    p.n_trees = 20;
    p.max_depth = 6;
    const auto f = train_rf(train, p);
    CHECK(!f.degenerate());
    const auto test = separable(rng, 300);
    for (std::size_t i = 0; i < test.size(); ++i) {
      // Points within the gap between sampled training values can go either way.
      if (std::abs(test.row(i)[0] - 0.6) < 0.02) continue;
      CHECK((f.predict_proba(test.row(i)) > 0.5 ? 1 : 0) == test.y[i]);
    }
  }

  TEST_CASE("gini impurity") {
    CHECK(gini_impurity(1, 2) == doctest::Approx(0.5));
    CHECK(gini_impurity(0, 5) == 0.0);
    CHECK(gini_impurity(5, 5) == 0.0);
    CHECK(gini_impurity(1, 4) == doctest::Approx(1 - 0.0625 - 0.5625));
  }

  TEST_CASE("forest is deterministic and independent of the thread count") {
    Rng rng(24);
    LabeledSamples s;
    s.n_features = 4;
    for (int i = 0; i < 800; ++i) {
      const std::array<double, 4> row{rng.uniform(), rng.uniform(), rng.normal(), rng.uniform()};
      s.add(row, rng.bernoulli(0.1 + 0.6 * row[0] * row[1]) ? 1 : 0);
    }
    ForestParams p;
    p.n_trees = 15;
    p.seed = 99;
    p.threads = 1;
    const auto a = train_rf(s, p);
    p.threads = 3;
    const auto b = train_rf(s, p);
    CHECK(a.to_json().dump() == b.to_json().dump());
    p.seed = 100;
    CHECK(train_rf(s, p).to_json().dump() != a.to_json().dump());
  }

  TEST_CASE("forest predictions survive strictly increasing feature transforms") {
    Rng rng(25);
    LabeledSamples s, t;
    s.n_features = t.n_features = 3;
    for (int i = 0; i < 500; ++i) {
      const std::array<double, 3> row{rng.uniform(), rng.uniform(), rng.uniform()};
      const int y = rng.bernoulli(row[0] > 0.5 ? 0.8 : 0.1) ? 1 : 0;
      s.add(row, y);
      const std::array<double, 3> mapped{std::exp(3 * row[0]), 5 * row[1] - 2, std::pow(row[2], 3)};
      t.add(mapped, y);
    }
    ForestParams p;
    p.n_trees = 10;
    const auto a = train_rf(s, p);
    const auto b = train_rf(t, p);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(a.predict_proba(s.row(i)) == b.predict_proba(t.row(i)));
  }

  TEST_CASE("forest json round trip and degenerate training sets") {
    Rng rng(26);
    const auto s = separable(rng, 200);
    ForestParams p;
    p.n_trees = 5;
    const auto f = train_rf(s, p);
    const auto g = RandomForest::from_json(f.to_json());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(f.predict_proba(s.row(i)) == g.predict_proba(s.row(i)));

    LabeledSamples zeros;
    zeros.n_features = 3;
    for (int i = 0; i < 10; ++i) zeros.add(std::array<double, 3>{rng.uniform(), 0, 0}, 0);
    const auto d = train_rf(zeros, p);
    CHECK(d.degenerate());
    CHECK(d.predict_proba(zeros.row(3)) == 0.0);

    LabeledSamples ones = zeros;
    std::fill(ones.y.begin(), ones.y.end(), 1);
    CHECK(train_rf(ones, p).predict_proba(zeros.row(0)) == 1.0);

    ForestParams bad;
    bad.n_trees = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("sc20 mitigates strictly above the threshold with nested mitigation sets") {
    const Interval iv{0, 100 * H};
    const Dataset data({timeline("n", {{H, false}, {2 * H, false}, {3 * H, false}})}, iv);
    const ProbabilityTable half{{0.5, 0.5, 0.5}};
    const auto pool = single_job_pool(50.0, 1);
    CHECK(replay_policy(sc20_rf_policy(half, 0.5), data, pool, iv, EnvConfig{}, 1).mitigations == 0);
    CHECK(replay_policy(sc20_rf_policy(half, 0.49), data, pool, iv, EnvConfig{}, 1).mitigations == 3);
    CHECK_THROWS_AS(sc20_rf_policy(half, 1.5), std::invalid_argument);

    Rng rng(27);
    const auto ev = random_events(rng, 60, 0.1);
    const Interval wide{0, ev.back().first + 1};
    const Dataset big({timeline("m", ev)}, wide);
    ProbabilityTable p(1);
    for (std::size_t i = 0; i < big.nodes()[0].timeline.events.size(); ++i) p[0].push_back(rng.uniform());
    std::set<std::size_t> previous = mitigated(sc20_rf_policy(p, 0.0), big, pool, wide)[0];
    for (double theta = 0.05; theta <= 1.0; theta += 0.05) {
      const auto now = mitigated(sc20_rf_policy(p, theta), big, pool, wide)[0];
      CHECK(std::includes(previous.begin(), previous.end(), now.begin(), now.end()));
      previous = now;
    }
  }

  TEST_CASE("myopic compares expected loss with the mitigation cost") {
    const ProbabilityTable p{{0.5, 0.0, 1.0}};
    const MitigationPolicyConfig m;  // 2 node-minutes
    const auto policy = myopic_rf_policy(p, m);
    StateFeatures s;
    DecisionContext ctx;
    ctx.state = &s;
    s.potential_ue_cost = 10.0;
    ctx.event_index = 0;
    CHECK(policy(ctx) == 1);
    ctx.event_index = 1;
    CHECK(policy(ctx) == 0);
    ctx.event_index = 2;
    s.potential_ue_cost = 0.03;
    CHECK(policy(ctx) == 0);
    s.potential_ue_cost = 0.04;
    CHECK(policy(ctx) == 1);
  }

  TEST_CASE("predictions cover only the requested interval") {
    Rng rng(28);
    const auto s = separable(rng, 100);
    LabeledSamples wide;
    wide.n_features = kLogFeatureCount;
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::array<double, kLogFeatureCount> row{};
      row[0] = s.row(i)[0];
      wide.add(row, s.y[i]);
    }
    ForestParams fp;
    fp.n_trees = 3;
    const auto f = train_rf(wide, fp);
    const Dataset data({timeline("n", {{H, false}, {5 * H, false}, {9 * H, false}})}, {0, 10 * H});
    const auto table = predict_all(f, data, {4 * H, 6 * H});
    REQUIRE(table.size() == 1);
    REQUIRE(table[0].size() == 3);
    CHECK(table[0][0] == 0.0);
    CHECK(table[0][1] == f.predict_proba(rf_features(data.nodes()[0].log_features[1])));
    CHECK(table[0][2] == 0.0);
  }

  TEST_CASE("optimal threshold matches an exhaustive grid search") {
    Rng rng(29);
    const JobPool pool({JobRecord{"a", 0, 6.0, 3}, JobRecord{"b", 0, 20.0, 8}});
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<NodeTimeline> tls;
      for (int n = 0; n < 3; ++n) tls.push_back(timeline("n" + std::to_string(n), random_events(rng, 25, 0.12)));
      Timestamp end = 0;
      for (const auto& tl : tls) end = std::max(end, tl.events.back().timestamp + 1);
      const Interval iv{0, end};
      const Dataset data(tls, iv);
      ProbabilityTable p;
      for (const auto& node : data.nodes()) {
        p.emplace_back();
        for (std::size_t i = 0; i < node.timeline.events.size(); ++i) p.back().push_back(rng.uniform());
      }
      EnvConfig cfg;
      cfg.mitigation.mitigation_cost_minutes = trial % 2 ? 30.0 : 2.0;
      auto brute = [&](double theta) {
        double total = 0.0;
        for (std::size_t n = 0; n < data.nodes().size(); ++n) {
          const auto& node = data.nodes()[n];
          std::vector<int> actions;
          for (std::size_t i = 0; i < node.timeline.events.size(); ++i)
            if (!node.timeline.events[i].ue) actions.push_back(p[n][i] > theta ? 1 : 0);
          const auto jobs = evaluation_jobs(pool, iv, node.timeline.node_id, 4, 1.0);
          const auto c = brute_force_cost(node.timeline, iv, jobs, cfg.mitigation, actions);
          total += c.ue_cost + c.mitigation_cost;
        }
        return total;
      };
      const auto grid = default_threshold_grid();
      REQUIRE(grid.size() == 101);
      double best_theta = 0.0, best = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 100; ++k) {
        const double c = brute(k / 100.0);
        if (k == 0 || c < best - 1e-9 * best) best = c, best_theta = k / 100.0;
      }
      const auto r = optimal_threshold(p, data, pool, iv, cfg, 4);
      CHECK(r.optimal.threshold == doctest::Approx(best_theta));
      CHECK(r.optimal.cost == doctest::Approx(best).epsilon(1e-9));
      REQUIRE(r.curve.size() == 101);
      for (const auto& c : r.curve) CHECK(c.cost == doctest::Approx(brute(c.threshold)).epsilon(1e-9));
      for (auto [delta, choice] : {std::pair{0.02, r.offset_2pct}, std::pair{0.05, r.offset_5pct}}) {
        const double up = std::min(1.0, best_theta + delta), down = std::max(0.0, best_theta - delta);
        const double worse = std::max(brute(up), brute(down));
        CHECK(choice.cost == doctest::Approx(worse).epsilon(1e-9));
        CHECK(choice.cost >= r.optimal.cost - 1e-9);
        const bool on_grid = std::abs(choice.threshold - up) < 1e-12 || std::abs(choice.threshold - down) < 1e-12;
        CHECK(on_grid);
      }
    }
  }

  TEST_CASE("policy spec labels and validation") {
    PolicySpec s;
    s.kind = PolicyKind::sc20_rf_offset;
    s.delta = 0.05;
    CHECK(s.label() == "sc20_rf_5pct");
    s.kind = PolicyKind::rl;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.kind = PolicyKind::sc20_rf;
    s.threshold = -0.1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
}
