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

#include <filesystem>
#include <fstream>

#include "support/synth_data.hpp"
#include "uemit/config.hpp"

using namespace uemit;
using namespace uemit::test;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("empty document yields the defaults") {
    const auto c = run_config_from_yaml("");
    const RunConfig d;
    CHECK(c.seed == d.seed);
    CHECK(c.episodes == d.episodes);
    CHECK(c.env.mitigation.mitigation_cost_minutes == 2.0);
    CHECK(c.env.mitigation.restartable);
    CHECK(c.search.base == Hyperparameters{});
    CHECK(c.evaluation.mitigation_costs_minutes == std::vector<double>{2.0, 5.0, 10.0});
    CHECK(c.evaluation.sensitivity_factors == std::vector<double>{0.1, 0.3, 1.0, 3.0, 10.0});
  }

  TEST_CASE("values are read into every section") {
    const auto c = run_config_from_yaml(R"(
seed: 42
episodes: 77
output_dir: out/x
data:
  errors: e.csv
  span_start: 2015-01-01T00:00:00Z
  span_end: 2015-06-01T00:00:00Z
mitigation: {cost_minutes: 5, restartable: false, job_scale: 3}
training:
  hyperparameters: {learning_rate: 0.001, gamma: 0.9, hidden: [16, 8]}
  cost: {nodes_used: 2}
search: {n_first: 3, n_second: 1, jobs: 2, space: {gammas: [0.5]}}
forest: {n_trees: 7}
evaluation: {threshold_mode: validation, mitigation_costs_minutes: [1, 4]}
synth: {n_nodes: 9, job_nodes: {median: 3}}
)");
    CHECK(c.seed == 42);
    CHECK(c.episodes == 77);
    CHECK(c.output_dir == "out/x");
    CHECK(c.data.errors == "e.csv");
    CHECK(c.data.span_start == parse_iso8601("2015-01-01T00:00:00Z"));
    CHECK(c.env.mitigation.mitigation_cost_minutes == 5.0);
    CHECK(!c.env.mitigation.restartable);
    CHECK(c.env.job_scale == 3.0);
    CHECK(c.search.base.learning_rate == 0.001);
    CHECK(c.search.base.gamma == 0.9);
    CHECK(c.search.base.hidden == std::vector<int>{16, 8});
    CHECK(c.search.cost.nodes_used == 2.0);
    CHECK(c.search.n_first == 3);
    CHECK(c.search.jobs == 2);
    CHECK(c.search.space.gammas == std::vector<double>{0.5});
    CHECK(c.forest.n_trees == 7);
    CHECK(c.evaluation.threshold_mode == ThresholdMode::validation);
    CHECK(c.evaluation.mitigation_costs_minutes == std::vector<double>{1.0, 4.0});
    CHECK(c.synth.n_nodes == 9);
    CHECK(c.synth.job_nodes.median == 3.0);

    const auto cv = c.crossval();
    CHECK(cv.search.episodes == 77);
    CHECK(cv.threshold_mode == ThresholdMode::validation);
    CHECK(cv.env.job_scale == 3.0);
  }

  TEST_CASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_AS(run_config_from_yaml("sed: 1"), std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_yaml("data: {errorz: x}"), std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_yaml("training: {hyperparameters: {lr: 1}}"), std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_yaml("seed: [1, 2]"), std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_yaml("data: 3"), std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_yaml("mitigation: {cost_minutes: -1}"), std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_yaml("evaluation: {threshold_mode: train}"), std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_yaml("search: {jobs: 0}"), std::invalid_argument);
    CHECK_THROWS_AS(run_config_from_yaml("seed: [unclosed"), std::invalid_argument);
    try {
      run_config_from_yaml("forest: {n_treez: 3}");
      FAIL("accepted an unknown key");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("forest.n_treez") != std::string::npos);
    }
  }

  TEST_CASE("canonical yaml round trips and drives the hash") {
    auto c = run_config_from_yaml("seed: 5\nforest: {n_trees: 3}\nsynth: {signal_strength: 0.75}\n");
    const auto yaml = run_config_to_yaml(c);
    const auto back = run_config_from_yaml(yaml);
    CHECK(run_config_to_yaml(back) == yaml);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
    c.episodes += 1;
    CHECK(config_hash(c) != config_hash(back));
  }

  TEST_CASE("loading written logs reproduces the in-memory pipeline") {
    auto cfg = small_synth(8);
    cfg.n_retirements = 2;
    const auto dir = std::filesystem::temp_directory_path() / "uemit_config_test";
    std::filesystem::create_directories(dir);
    const auto logs = generate_logs(cfg);
    write_file(dir / "errors.csv", logs.errors_csv);
    write_file(dir / "jobs.csv", logs.jobs_csv);
    write_file(dir / "retirements.csv", logs.retirements_csv);

    DataConfig dc;
    dc.errors = dir / "errors.csv";
    dc.jobs = dir / "jobs.csv";
    dc.retirements = dir / "retirements.csv";
    dc.span_start = cfg.span().begin;
    dc.span_end = cfg.span().end;
    const auto loaded = load_data(dc);
    const auto mem = synth_dataset(cfg);
    CHECK(loaded.dataset.span() == mem.dataset.span());
    REQUIRE(loaded.dataset.nodes().size() == mem.dataset.nodes().size());
    for (std::size_t n = 0; n < mem.dataset.nodes().size(); ++n) {
      const auto& a = loaded.dataset.nodes()[n].timeline.events;
      const auto& b = mem.dataset.nodes()[n].timeline.events;
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].timestamp == b[i].timestamp);
        CHECK(a[i].ue == b[i].ue);
      }
    }
    CHECK(loaded.pool.jobs().size() == mem.pool.jobs().size());
    CHECK(loaded.ues_after_reduction == mem.raw.planted.size());
    std::filesystem::remove_all(dir);
  }
}
