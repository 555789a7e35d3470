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

// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails. Usage: uemit_acceptance [profile.yaml]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "support/brute_force.hpp"
#include "support/builders.hpp"
#include "support/burst_oracle.hpp"
#include "support/gradcheck.hpp"
#include "support/synth_data.hpp"
#include "uemit/agent/checkpoint.hpp"
#include "uemit/agent/dqn.hpp"
#include "uemit/agent/replay_buffer.hpp"
#include "uemit/config.hpp"
#include "uemit/eval/crossval.hpp"
#include "uemit/eval/sensitivity.hpp"
#include "uemit/eval/splits.hpp"
#include "uemit/policies/policies.hpp"

using namespace uemit;
using namespace uemit::test;

namespace {

constexpr Timestamp H = kSecondsPerHour;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool relative_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

// The planted-signal run shared by criteria 1, 2, 3, 7 and 9.
struct ProfileRun {
  RunConfig config;
  std::unique_ptr<SynthDataset> data;
  CrossvalResult result;
  double seconds = 0.0;
};

ProfileRun run_profile(const std::filesystem::path& path) {
  ProfileRun run;
  run.config = load_run_config(path);
  const auto started = std::chrono::steady_clock::now();
  run.data = std::make_unique<SynthDataset>(synth_dataset(run.config.synth));
  auto cv = run.config.crossval();
  cv.log = [](const std::string& line) { std::fprintf(stderr, "  %s\n", line.c_str()); };
  run.result = run_crossval(run.data->dataset, run.data->pool, cv);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return run;
}

Outcome criterion_1(const ProfileRun& run) {
  Outcome o;
  const auto& rep = run.result.report;
  const double oracle = rep.total("oracle").total(), rl = rep.total("rl").total();
  const double never = rep.total("never").total(), always = rep.total("always").total();
  const double sc20 = rep.total("sc20_rf").total();
  std::size_t ues = 0;
  for (const auto& p : run.data->raw.planted) ues += run.data->dataset.span().contains(p.time);
  o.require(run.config.synth.signal_strength >= 0.7, "profile signal_strength < 0.7");
  o.require(ues >= 50, "profile has fewer than 50 UEs");
  o.require(run.config.env.mitigation.mitigation_cost_minutes == 2.0, "profile mitigation cost is not 2 node-minutes");
  o.require(oracle <= rl, "oracle > rl");
  o.require(rl < std::min(never, always), "rl >= min(never, always)");
  o.require(rl <= sc20 * 1.05, "rl > 1.05 x sc20_rf");
  o.require(run.seconds <= 2.0 * 3600.0, "runtime over 2 h");
  std::ostringstream d;
  d << "oracle=" << fmt("%.1f", oracle) << " rl=" << fmt("%.1f", rl) << " never=" << fmt("%.1f", never)
    << " always=" << fmt("%.1f", always) << " sc20_rf=" << fmt("%.1f", sc20) << " node-hours, " << ues << " UEs, "
    << fmt("%.0f s", run.seconds);
  o.detail = o.pass ? d.str() : o.detail + " (" + d.str() + ")";
  return o;
}

Outcome criterion_2(const ProfileRun& run) {
  Outcome o;
  const auto& rep = run.result.report;
  const auto never = rep.total("never").metrics, always = rep.total("always").metrics;
  const auto oracle = rep.total("oracle").metrics;
  o.require(never.recall() == 0.0, "recall(never) != 0");
  o.require(!never.precision().has_value(), "precision(never) defined");
  o.require(always.recall() == oracle.recall(), "recall(always) != recall(oracle)");
  o.require(oracle.tp + oracle.fp == 0 || oracle.precision() == 1.0, "precision(oracle) != 100%");
  o.require(oracle.fp == 0, "FP(oracle) != 0");
  if (o.pass)
    o.detail = "recall never=0 always=oracle=" + fmt("%.3f", always.recall().value_or(0.0)) +
               ", precision oracle=1, FP oracle=0";
  return o;
}

Outcome criterion_3(const ProfileRun& run) {
  Outcome o;
  double worst = 0.0;
  for (const auto& row : run.result.report.rows) {
    const double replayed = row.ue_cost + row.mitigation_cost - row.training_cost;
    worst = std::max(worst, std::abs(-row.cumulative_reward - replayed) / std::max(replayed, 1e-300));
    o.require(relative_equal(-row.cumulative_reward, replayed, 1e-9), row.policy + " split " + std::to_string(row.split));
  }
  o.detail = (o.pass ? "" : o.detail + "; ") + std::to_string(run.result.report.rows.size()) +
             " policy-split rows, max relative gap " + fmt("%.2e", worst);
  return o;
}

Outcome criterion_4() {
  Outcome o;
  Rng rng(404);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::vector<int> hidden;
    for (std::uint64_t l = 0, n = 1 + rng.uniform_index(3); l < n; ++l) hidden.push_back(2 + static_cast<int>(rng.uniform_index(7)));
    const int in = 2 + static_cast<int>(rng.uniform_index(14));
    const auto r = gradient_check(rng, in, hidden, 1 + static_cast<int>(rng.uniform_index(6)));
    worst = std::max(worst, r.max_relative_error);
  }
  o.require(worst <= 1e-4, "relative error above 1e-4");
  o.detail = (o.pass ? "" : o.detail + "; ") + "20 networks, max relative error " + fmt("%.2e", worst);
  return o;
}

Outcome criterion_5() {
  Outcome o;
  Rng rng(505);
  double worst = 0.0;
  for (int v = 0; v < 5; ++v) {
    const std::size_t n = 3 + rng.uniform_index(14);
    const double alpha = rng.uniform(0.2, 1.0);
    PrioritizedReplay buffer(n, alpha);
    std::vector<double> p(n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      buffer.add(StoredTransition{});
      p[i] = rng.uniform(0.01, 10.0);
      buffer.set_priority(i, p[i]);
      z += std::pow(p[i], alpha);
    }
    std::vector<double> counts(n, 0.0);
    const int draws = 100000, batch = 100;
    for (int d = 0; d < draws / batch; ++d)
      for (auto i : buffer.sample(batch, 0.5, rng).indices) counts[i] += 1.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(counts[i] / draws - std::pow(p[i], alpha) / z));
  }
  o.require(worst <= 0.02, "frequency off by more than 0.02");
  o.detail = (o.pass ? "" : o.detail + "; ") + "5 vectors x 100000 draws, max deviation " + fmt("%.4f", worst);
  return o;
}

Outcome criterion_6() {
  Outcome o;
  Rng rng(606);
  QNetwork net(static_cast<int>(kFeatureCount));
  net.initialize(rng);
  QNetwork target = net;
  target.initialize(rng);
  double worst = 0.0;
  bool targets_ok = true;
  for (int i = 0; i < 1000; ++i) {
    std::array<double, kFeatureCount> s{}, s2{};
    for (auto& x : s) x = rng.normal() * 3.0;
    for (auto& x : s2) x = rng.normal() * 3.0;
    const auto q = net.forward(s);
    worst = std::max(worst, std::abs(0.5 * (q[0] + q[1]) - net.value(s)));
    StoredTransition t;
    t.state = s;
    t.next_state = s2;
    t.action = static_cast<int>(rng.uniform_index(2));
    t.reward = -rng.uniform(0.0, 100.0);
    t.terminal = true;
    targets_ok &= td_target(net, target, t, 0.99) == t.reward;
    t.terminal = false;
    targets_ok &= td_target(net, target, t, 0.0) == t.reward;
  }
  o.require(worst <= 1e-10, "mean Q differs from V");
  o.require(targets_ok, "terminal or gamma=0 target differs from r");
  o.detail = (o.pass ? "" : o.detail + "; ") + "1000 states, max |mean Q - V| " + fmt("%.2e", worst) +
             ", terminal and gamma=0 targets equal r";
  return o;
}

Outcome criterion_7(const ProfileRun& run) {
  Outcome o;
  const auto& plan = run.result.plan;
  std::size_t scanned = 0;
  for (const auto& s : plan.splits) {
    Timestamp latest_fit = std::numeric_limits<Timestamp>::min(), earliest_test = std::numeric_limits<Timestamp>::max();
    for (const auto& node : run.data->dataset.nodes()) {
      for (const auto& e : node.timeline.events) {
        if (s.train.contains(e.timestamp) || s.validation.contains(e.timestamp)) latest_fit = std::max(latest_fit, e.timestamp);
        if (s.test.contains(e.timestamp)) earliest_test = std::min(earliest_test, e.timestamp);
        ++scanned;
      }
    }
    o.require(latest_fit < earliest_test, "split " + std::to_string(s.index) + " leaks test time");
    o.require(s.train.end <= s.test.begin && s.validation.end <= s.test.begin,
              "split " + std::to_string(s.index) + " interval overlaps test");
  }
  const auto& s1 = plan.splits.at(0);
  const Timestamp first_span = std::max(s1.train.end, s1.validation.end) - std::min(s1.train.begin, s1.validation.begin);
  o.require(first_span == 14 * kSecondsPerDay, "split-1 train+val is not 14 days");
  o.detail = (o.pass ? "" : o.detail + "; ") + std::to_string(plan.splits.size()) + " splits, " +
             std::to_string(scanned) + " event checks, split-1 train+val " + fmt("%.1f days", first_span / 86400.0);
  return o;
}

Outcome criterion_8() {
  Outcome o;
  Rng rng(808);
  const std::int64_t w = kUeBurstWindowSeconds;
  int gap_violations = 0, mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Timestamp> ues;
    Timestamp t = 0;
    for (std::uint64_t i = 0, n = 1 + rng.uniform_index(12); i < n; ++i) {
      t += rng.bernoulli(0.3) ? w : static_cast<Timestamp>(rng.uniform_index(static_cast<std::uint64_t>(w)));
      ues.push_back(t);
    }
    std::vector<LogEvent> events;
    for (auto u : ues) {
      LogEvent e;
      e.timestamp = u;
      e.node_id = "n";
      e.kind = EventKind::ue;
      e.ue_type = UeType::ecc;
      events.push_back(e);
    }
    std::vector<Timestamp> kept;
    for (const auto& e : reduce_ue_bursts(events, w)) kept.push_back(e.timestamp);
    for (std::size_t i = 1; i < kept.size(); ++i) gap_violations += kept[i] - kept[i - 1] < w;
    const auto fixed = burst_fixed_points(ues, w);
    mismatches += fixed.size() != 1 || fixed[0] != kept;
  }
  o.require(gap_violations == 0, std::to_string(gap_violations) + " gaps under 168 h");
  o.require(mismatches == 0, std::to_string(mismatches) + " brute-force mismatches");

  SynthConfig cfg;
  cfg.span_months = 26.0;
  cfg.ue_count_target = 67;
  const auto data = generate(cfg);
  std::size_t raw = 0, reduced = 0;
  for (const auto& e : data.events) raw += e.is_ue();
  for (const auto& e : reduce_ue_bursts(data.events, w)) reduced += e.is_ue();
  const double ratio = static_cast<double>(raw) / static_cast<double>(reduced);
  o.require(reduced == 67, "burst-heavy input did not reduce to 67 UEs");
  o.require(ratio >= 3.0 && ratio <= 7.0, "reduction ratio outside 3-7");
  o.detail = (o.pass ? "" : o.detail + "; ") + "1000 instances match the brute force; burst-heavy log " +
             std::to_string(raw) + " -> " + std::to_string(reduced) + " UEs";
  return o;
}

Outcome criterion_9(const ProfileRun& run) {
  Outcome o;
  auto cv = run.config.crossval();
  cv.run_rl = false;
  cv.run_rf = false;
  const std::vector<double> factors = {0.1, 0.3, 1.0, 3.0, 10.0};
  const auto points = job_scale_sensitivity(run.data->dataset, run.data->pool, cv, factors);
  std::vector<double> never;
  bool constant = true;
  const double always_m = points.front().report.total("always").mitigation_cost;
  for (const auto& p : points) {
    never.push_back(p.report.total("never").total());
    constant &= p.report.total("always").mitigation_cost == always_m;
  }
  const double r2 = linear_r_squared(factors, never);
  const double never01 = never.front(), always01 = points.front().report.total("always").total();
  o.require(r2 > 0.999, "never not linear in the factor");
  o.require(constant, "always mitigation cost varies");
  o.require(never01 < always01, "never does not beat always at factor 0.1");
  o.detail = (o.pass ? "" : o.detail + "; ") + "R^2=" + fmt("%.6f", r2) + ", always mitigation " +
             fmt("%.2f", always_m) + " node-hours at every factor, factor 0.1 never=" + fmt("%.1f", never01) +
             " always=" + fmt("%.1f", always01);
  return o;
}

// Synthesis, file round trip, cross-validation with training and checkpoint
// serialization; returns every artifact as bytes.
std::vector<std::string> full_run(const std::filesystem::path& dir) {
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto cfg = run_config_from_yaml(R"(
seed: 11
episodes: 30
training:
  hyperparameters: {hidden: [16, 16], learning_starts: 100, batch_size: 32, epsilon_decay_steps: 1000}
search: {n_first: 2, n_second: 1}
forest: {n_trees: 10}
synth: {n_nodes: 12, ue_count_target: 20, ce_base_rate: 1.0,
        job_nodes: {median: 2.0, sigma: 1.0, min: 1.0, max: 32.0},
        job_duration_hours: {median: 3.0, sigma: 1.0, min: 0.05, max: 48.0}}
)");
  const auto logs = generate_logs(cfg.synth);
  std::vector<std::string> out = {logs.errors_csv, logs.jobs_csv, logs.retirements_csv};
  for (const auto& [name, text] : {std::pair{"errors.csv", &logs.errors_csv}, {"jobs.csv", &logs.jobs_csv},
                                   {"retirements.csv", &logs.retirements_csv}}) {
    std::ofstream f(dir / name, std::ios::binary);
    f << *text;
  }
  cfg.data.errors = dir / "errors.csv";
  cfg.data.jobs = dir / "jobs.csv";
  cfg.data.retirements = dir / "retirements.csv";
  cfg.data.span_start = cfg.synth.span().begin;
  cfg.data.span_end = cfg.synth.span().end;
  const auto loaded = load_data(cfg.data);
  const auto r = run_crossval(loaded.dataset, loaded.pool, cfg.crossval());
  out.push_back(r.report.to_csv());
  out.push_back(r.report.metrics_csv());
  for (const auto& s : r.splits) {
    if (s.search) out.push_back(agent_to_json(s.search->best).dump(2));
    if (s.forest) out.push_back(s.forest->to_json().dump());
  }
  std::filesystem::remove_all(dir);
  return out;
}

Outcome criterion_10() {
  Outcome o;
  const auto tmp = std::filesystem::temp_directory_path();
  const auto a = full_run(tmp / "uemit_acceptance_a");
  const auto b = full_run(tmp / "uemit_acceptance_b");
  o.require(a.size() == b.size(), "artifact counts differ");
  std::size_t bytes = 0, differing = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    bytes += a[i].size();
    differing += a[i] != b[i];
  }
  o.require(differing == 0, std::to_string(differing) + " artifacts differ");
  o.detail = (o.pass ? "" : o.detail + "; ") + std::to_string(a.size()) + " artifacts, " + std::to_string(bytes) +
             " bytes identical across two seeded runs";
  return o;
}

Outcome criterion_11() {
  Outcome o;
  Rng rng(1111);
  const JobPool pool({JobRecord{"a", 0, 3.0, 2}, JobRecord{"b", 0, 9.0, 7}, JobRecord{"c", 0, 0.5, 1}});
  std::size_t replays = 0;
  int mismatches = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<LogEvent> raw;
    Timestamp t = 0;
    const auto n = 1 + rng.uniform_index(12);
    for (std::uint64_t i = 0; i < n; ++i) {
      t += 60 + static_cast<Timestamp>(rng.uniform_index(8 * H));
      raw.push_back(rng.bernoulli(0.3) ? ue(t, "n") : ce(t, "n"));
    }
    const Interval iv{0, t + 1};
    const Dataset data({merge_per_minute(raw)}, iv);
    const auto& tl = data.nodes()[0].timeline;
    EnvConfig cfg;
    cfg.mitigation.restartable = trial % 4 != 0;
    cfg.mitigation.mitigation_cost_minutes = 1.0 + static_cast<double>(rng.uniform_index(10));
    const auto jobs = evaluation_jobs(pool, iv, "n", 3, cfg.job_scale);

    ProbabilityTable p(1);
    for (std::size_t i = 0; i < tl.events.size(); ++i) p[0].push_back(rng.uniform());
    AgentModel agent;
    agent.net = QNetwork(static_cast<int>(kFeatureCount), {4});
    agent.net.initialize(rng);
    std::vector<std::pair<std::string, PolicyFn>> policies = {
        {"never", never_policy()},
        {"always", always_policy()},
        {"oracle", oracle_policy(data, iv)},
        {"sc20_rf", sc20_rf_policy(p, 0.5)},
        {"myopic_rf", myopic_rf_policy(p, cfg.mitigation)},
        {"rl", agent.policy()}};
    std::size_t decisions = 0;
    for (const auto& e : tl.events) decisions += !e.ue;
    for (std::uint32_t mask = 0; mask < (1u << decisions); ++mask) {
      auto next = std::make_shared<int>(0);
      policies.push_back(
          {"mask " + std::to_string(mask), [mask, next](const DecisionContext&) { return static_cast<int>(mask >> (*next)++ & 1u); }});
    }
    for (const auto& [name, policy] : policies) {
      std::vector<int> actions;
      auto recorder = [&](const DecisionContext& ctx) {
        const int a = policy(ctx);
        actions.push_back(a);
        return a;
      };
      const auto got = replay_policy(recorder, data, pool, iv, cfg, 3);
      const auto want = brute_force_cost(tl, iv, jobs, cfg.mitigation, actions);
      ++replays;
      const bool ok = relative_equal(got.ue_cost, want.ue_cost, 1e-12) && got.mitigations == want.mitigations &&
                      relative_equal(got.mitigation_cost, want.mitigation_cost, 1e-12) &&
                      relative_equal(-got.cumulative_reward, want.ue_cost + want.mitigation_cost, 1e-12);
      if (!ok) {
        ++mismatches;
        o.require(false, name + " in trial " + std::to_string(trial));
      }
    }
  }
  o.detail = (o.pass ? "" : o.detail + "; ") + std::to_string(replays) + " replays on logs of <= 12 events, " +
             std::to_string(mismatches) + " mismatches";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path profile = argc > 1 ? argv[1] : UEMIT_ACCEPTANCE_PROFILE;
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s %2d %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  std::unique_ptr<ProfileRun> run;
  std::string run_error;
  try {
    std::fprintf(stderr, "planted-signal cross-validation with %s\n", profile.c_str());
    run = std::make_unique<ProfileRun>(run_profile(profile));
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto with_run = [&](Outcome (*check)(const ProfileRun&)) {
    return [&, check]() -> Outcome {
      if (!run) return {false, "profile run failed: " + run_error};
      return check(*run);
    };
  };

  report(1, "ordering", with_run(criterion_1));
  report(2, "table identities", with_run(criterion_2));
  report(3, "reward accounting", with_run(criterion_3));
  report(4, "gradient check", criterion_4);
  report(5, "prioritized sampling", criterion_5);
  report(6, "double-Q and dueling", criterion_6);
  report(7, "split hygiene", with_run(criterion_7));
  report(8, "burst reduction", criterion_8);
  report(9, "job-size sensitivity", with_run(criterion_9));
  report(10, "determinism", criterion_10);
  report(11, "brute-force replay", criterion_11);
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
