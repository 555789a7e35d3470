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
#include <map>

#include "uemit/logs.hpp"
#include "uemit/rng.hpp"
#include "uemit/synthgen.hpp"

using namespace uemit;

namespace {

// Upper 1% points of the chi-square distribution, df = 1..10.
constexpr double kChiSquare99[] = {6.635, 9.210, 11.345, 13.277, 15.086, 16.812, 18.475, 20.090, 21.666, 23.209};

struct Homogeneity {
  double statistic = 0;
  int df = 0;
};

// Chi-square test of homogeneity for two samples of small non-negative counts.
// Categories from the top are pooled until every expected cell is >= 5.
Homogeneity chi_square_homogeneity(const std::vector<int>& a, const std::vector<int>& b) {
  int top = 0;
  for (int v : a) top = std::max(top, v);
  for (int v : b) top = std::max(top, v);
  std::vector<double> ca(static_cast<std::size_t>(top) + 1), cb(ca.size());
  for (int v : a) ++ca[static_cast<std::size_t>(v)];
  for (int v : b) ++cb[static_cast<std::size_t>(v)];
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size()), n = na + nb;
  auto min_expected = [&](double x, double y) { return std::min(na, nb) * (x + y) / n; };
  while (ca.size() > 2 && min_expected(ca.back(), cb.back()) < 5.0) {
    ca[ca.size() - 2] += ca.back();
    cb[cb.size() - 2] += cb.back();
    ca.pop_back();
    cb.pop_back();
  }
  Homogeneity h;
  for (std::size_t k = 0; k < ca.size(); ++k) {
    const double col = ca[k] + cb[k];
    const double ea = na * col / n, eb = nb * col / n;
    h.statistic += (ca[k] - ea) * (ca[k] - ea) / ea + (cb[k] - eb) * (cb[k] - eb) / eb;
  }
  h.df = static_cast<int>(ca.size()) - 1;
  return h;
}

// CE events in [t - 72 h, t) before each counted UE versus the same window at
// uniformly random (node, time) points.
std::pair<std::vector<int>, std::vector<int>> pre_ue_window_counts(const SynthData& data, std::size_t background,
                                                                   std::uint64_t seed) {
  const std::int64_t w = 72 * kSecondsPerHour;
  std::map<std::string, std::vector<Timestamp>> ce_times;
  std::vector<std::string> nodes;
  for (const auto& e : data.events) {
    if (e.kind == EventKind::ce_batch) ce_times[e.node_id].push_back(e.timestamp);
  }
  for (const auto& [n, t] : ce_times) nodes.push_back(n);
  auto count = [&](const std::string& node, Timestamp t) {
    const auto it = ce_times.find(node);
    if (it == ce_times.end()) return 0;
    const auto& v = it->second;
    return static_cast<int>(std::lower_bound(v.begin(), v.end(), t) - std::lower_bound(v.begin(), v.end(), t - w));
  };
  std::vector<int> pre, bg;
  for (const auto& p : data.planted) {
    if (p.time - w >= data.span.begin) pre.push_back(count(p.node_id, p.time));
  }
  Rng rng(seed);
  while (bg.size() < background) {
    const auto& node = nodes[rng.uniform_index(nodes.size())];
    const auto t = data.span.begin + w +
                   static_cast<Timestamp>(rng.uniform_index(static_cast<std::uint64_t>(data.span.duration() - w)));
    bg.push_back(count(node, t));
  }
  return {pre, bg};
}

std::size_t counted_ues(const SynthData& data) {
  std::size_t n = 0;
  for (const auto& t : build_timelines(data.events, data.retirements))
    for (const auto& e : t.events) n += e.ue;
  return n;
}

}  // namespace

TEST_SUITE("synthgen") {
  TEST_CASE("same seed gives byte-identical logs, different seeds differ") {
    SynthConfig cfg;
    cfg.n_nodes = 10;
    cfg.span_months = 2.0;
    cfg.ue_count_target = 6;
    cfg.n_retirements = 2;
    const auto a = generate_logs(cfg);
    const auto b = generate_logs(cfg);
    CHECK(a.errors_csv == b.errors_csv);
    CHECK(a.jobs_csv == b.jobs_csv);
    CHECK(a.retirements_csv == b.retirements_csv);
    cfg.seed = 2;
    CHECK(generate_logs(cfg).errors_csv != a.errors_csv);
  }

  TEST_CASE("counted UEs hit the target exactly at the 26-month scale") {
    SynthConfig cfg;
    cfg.span_months = 26.0;
    cfg.ue_count_target = 67;
    cfg.n_retirements = 5;
    const auto data = generate(cfg);
    CHECK(counted_ues(data) == 67);
    CHECK(data.planted.size() == 67);
    std::size_t raw = 0;
    for (const auto& e : data.events) raw += e.is_ue();
    CHECK(raw > 67);  // bursts exist before reduction
  }

  TEST_CASE("signalled fraction follows signal_strength") {
    SynthConfig cfg;
    cfg.ue_count_target = 40;
    cfg.signal_strength = 0.75;
    const auto data = generate(cfg);
    const auto s = std::count_if(data.planted.begin(), data.planted.end(), [](const auto& p) { return p.signalled; });
    CHECK(s == 30);
  }

  TEST_CASE("without a planted signal, pre-UE CE counts match the background") {
    SynthConfig cfg;
    cfg.n_nodes = 3000;
    cfg.span_months = 26.0;
    cfg.ue_count_target = 10000;
    cfg.signal_strength = 0.0;
    const auto data = generate(cfg);
    const auto [pre, bg] = pre_ue_window_counts(data, 10000, 99);
    CHECK(pre.size() > 9000);
    const auto h = chi_square_homogeneity(pre, bg);
    REQUIRE(h.df >= 1);
    REQUIRE(h.df <= 10);
    INFO("chi2 = " << h.statistic << " df = " << h.df);
    CHECK(h.statistic < kChiSquare99[h.df - 1]);

    // The same test detects the planted signal.
    cfg.signal_strength = 0.8;
    const auto signalled = generate(cfg);
    const auto [pre_s, bg_s] = pre_ue_window_counts(signalled, 10000, 99);
    const auto hs = chi_square_homogeneity(pre_s, bg_s);
    CHECK(hs.statistic > 10.0 * kChiSquare99[hs.df - 1]);
  }

  TEST_CASE("generated logs pass the validators and are sorted") {
    SynthConfig cfg;
    cfg.n_retirements = 3;
    const auto logs = generate_logs(cfg);
    std::istringstream e(logs.errors_csv), j(logs.jobs_csv), r(logs.retirements_csv);
    const auto events = parse_error_log(e);
    CHECK(!events.empty());
    CHECK(!parse_job_log(j).empty());
    CHECK(parse_retirements(r).size() == 3);
    for (std::size_t i = 1; i < events.size(); ++i) {
      if (events[i].node_id == events[i - 1].node_id) CHECK(events[i].timestamp >= events[i - 1].timestamp);
    }
  }

  TEST_CASE("doubling ce_base_rate roughly doubles CE events") {
    SynthConfig cfg;
    cfg.n_nodes = 200;
    cfg.span_months = 6.0;
    cfg.ue_count_target = 1;
    cfg.signal_strength = 0.0;
    cfg.ue_followers_mean = 0.0;
    auto ces = [](const SynthData& d) {
      return static_cast<double>(
          std::count_if(d.events.begin(), d.events.end(), [](const LogEvent& e) { return e.kind == EventKind::ce_batch; }));
    };
    const double base = ces(generate(cfg));
    cfg.ce_base_rate *= 2.0;
    const double doubled = ces(generate(cfg));
    CHECK(doubled / base == doctest::Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("job marginals are heavy-tailed and cover the span") {
    SynthConfig cfg;
    cfg.span_months = 26.0;
    Rng rng(7);
    auto jobs = generate_jobs(cfg, cfg.span(), rng);
    REQUIRE(jobs.size() >= 10000);
    jobs.resize(10000);
    const auto [nmin, nmax] = std::minmax_element(jobs.begin(), jobs.end(), [](const auto& a, const auto& b) {
      return a.num_nodes < b.num_nodes;
    });
    const auto [dmin, dmax] = std::minmax_element(jobs.begin(), jobs.end(), [](const auto& a, const auto& b) {
      return a.duration_hours < b.duration_hours;
    });
    CHECK(static_cast<double>(nmax->num_nodes) / static_cast<double>(nmin->num_nodes) >= 100.0);
    CHECK(dmax->duration_hours / dmin->duration_hours >= 100.0);

    Rng rng2(8);
    auto all = generate_jobs(cfg, cfg.span(), rng2);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.start_time < b.start_time; });
    const Interval span = cfg.span();
    Timestamp covered = 0, reach = span.begin;
    for (const auto& j : all) {
      const Timestamp s = std::max(j.start_time, reach);
      const Timestamp e = std::min<Timestamp>(span.end, j.start_time + std::llround(j.duration_hours * kSecondsPerHour));
      if (e > s) {
        covered += e - s;
        reach = e;
      }
    }
    CHECK(static_cast<double>(covered) / static_cast<double>(span.duration()) >= 0.95);
  }

  TEST_CASE("UE to event imbalance spans orders of magnitude at cluster scale") {
    SynthConfig cfg;
    cfg.n_nodes = 3000;
    cfg.span_months = 26.0;
    cfg.ue_count_target = 67;
    const auto data = generate(cfg);
    std::size_t events = 0, ues = 0;
    for (const auto& t : build_timelines(data.events, data.retirements)) {
      events += t.events.size();
      for (const auto& e : t.events) ues += e.ue;
    }
    const double orders = std::log10(static_cast<double>(events) / static_cast<double>(ues));
    INFO("events " << events << " ues " << ues);
    CHECK(orders >= 3.0);
    CHECK(orders <= 4.5);
  }

  TEST_CASE("infeasible or invalid configurations are rejected") {
    SynthConfig cfg;
    cfg.n_nodes = 2;
    cfg.span_months = 1.0;
    cfg.ue_count_target = 100;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
    SynthConfig bad;
    bad.signal_strength = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SynthConfig{};
    bad.n_nodes = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}
