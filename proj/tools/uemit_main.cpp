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

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uemit/agent/checkpoint.hpp"
#include "uemit/config.hpp"
#include "uemit/eval/crossval.hpp"
#include "uemit/eval/heatmap.hpp"
#include "uemit/eval/sensitivity.hpp"
#include "uemit/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<long> episodes;
  std::optional<double> mitigation_cost;
  bool verbose = false;
};

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Run {
 public:
  Run(const Common& common, std::string command) : command_(std::move(command)), verbose_(common.verbose) {
    config_ = common.config_path.empty() ? uemit::RunConfig{} : uemit::load_run_config(common.config_path);
    if (common.seed) config_.seed = *common.seed;
    if (common.jobs) config_.search.jobs = *common.jobs;
    if (common.episodes) config_.episodes = *common.episodes;
    if (common.mitigation_cost) config_.env.mitigation.mitigation_cost_minutes = *common.mitigation_cost;
    if (!common.out.empty()) {
      config_.output_dir = common.out;
    } else if (const char* env = std::getenv("UEMIT_OUT"); env != nullptr && *env != '\0') {
      config_.output_dir = env;
    }
    config_.validate();
    fs::create_directories(config_.output_dir);
    started_ = std::chrono::steady_clock::now();
  }

  uemit::RunConfig& config() { return config_; }
  fs::path dir() const { return config_.output_dir; }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir() / name;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
    outputs_[name] = hex(uemit::fnv1a64(content));
  }

  void log(const std::string& line) const {
    if (verbose_) std::cerr << "[uemit] " << line << '\n';
  }
  std::function<void(const std::string&)> logger() const {
    return [this](const std::string& s) { log(s); };
  }

  json& extra() { return extra_; }

  void finish() {
    json m;
    m["tool"] = "uemit";
    m["version"] = UEMIT_VERSION;
    m["command"] = command_;
    m["seed"] = config_.seed;
    m["config_hash"] = uemit::config_hash(config_);
    m["config"] = uemit::run_config_to_yaml(config_);
    m["outputs"] = outputs_;
    m["wallclock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    for (auto& [k, v] : extra_.items()) m[k] = v;
    std::ofstream out(dir() / "manifest.json");
    out << m.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing manifest");
    std::cout << "wrote " << outputs_.size() << " file(s) to " << dir().string() << '\n';
  }

 private:
  std::string command_;
  bool verbose_;
  uemit::RunConfig config_;
  std::map<std::string, std::string> outputs_;
  json extra_ = json::object();
  std::chrono::steady_clock::time_point started_;
};

std::string cost_tag(double minutes) { return num(minutes) + "min"; }

json search_summary(const uemit::SearchResult& s) {
  json c = json::array();
  for (const auto& r : s.candidates) {
    c.push_back({{"round", r.round},
                 {"index", r.index},
                 {"warm_started", r.warm_started},
                 {"train_cost", r.train_cost},
                 {"validation_cost", r.validation_cost},
                 {"env_steps", r.stats.env_steps},
                 {"gradient_steps", r.stats.gradient_steps},
                 {"training_cost_node_hours", r.stats.cost_node_hours},
                 {"hyperparameters", uemit::hyperparameters_to_json(r.hp)}});
  }
  return {{"selected_on_training", s.selected_on_training},
          {"total_training_cost", s.total_training_cost},
          {"best", {{"round", s.best_candidate.round}, {"index", s.best_candidate.index}}},
          {"candidates", c}};
}

void save_checkpoints(Run& run, const uemit::CrossvalResult& cv, const std::string& prefix) {
  for (const auto& art : cv.splits) {
    if (!art.search) continue;
    const json meta = {{"split", art.split.index},
                       {"mitigation_cost_minutes", run.config().env.mitigation.mitigation_cost_minutes},
                       {"restartable", run.config().env.mitigation.restartable},
                       {"job_scale", run.config().env.job_scale},
                       {"training_cost_node_hours", art.search->total_training_cost},
                       {"config_hash", uemit::config_hash(run.config())},
                       {"search", search_summary(*art.search)}};
    run.write("checkpoints/" + prefix + "split_" + std::to_string(art.split.index) + ".json",
              uemit::agent_to_json(art.search->best, meta).dump() + "\n");
  }
}

uemit::LoadedData load(Run& run) {
  auto data = uemit::load_data(run.config().data);
  run.log("loaded " + std::to_string(data.raw_events) + " raw events, " + std::to_string(data.dataset.nodes().size()) +
          " nodes, " + std::to_string(data.ues_after_reduction) + " UEs after burst reduction");
  run.extra()["span"] = {{"start", uemit::format_iso8601(data.dataset.span().begin)},
                         {"end", uemit::format_iso8601(data.dataset.span().end)}};
  run.extra()["ues"] = data.ues_after_reduction;
  return data;
}

int cmd_synth(const Common& common) {
  Run run(common, "synth");
  auto& cfg = run.config().synth;
  if (common.seed) cfg.seed = *common.seed;
  const auto data = uemit::generate(cfg);
  run.write("errors.csv", uemit::format_error_log(data.events));
  run.write("jobs.csv", uemit::format_job_log(data.jobs));
  run.write("retirements.csv", uemit::format_retirements(data.retirements));
  run.extra()["span"] = {{"start", uemit::format_iso8601(data.span.begin)}, {"end", uemit::format_iso8601(data.span.end)}};
  run.extra()["synth_seed"] = cfg.seed;
  run.extra()["planted_ues"] = data.planted.size();
  run.finish();
  return 0;
}

int cmd_train(const Common& common) {
  Run run(common, "train");
  const auto data = load(run);
  auto cv = run.config().crossval();
  cv.run_rf = false;
  cv.log = run.logger();
  cv.search.log = run.logger();
  const auto result = uemit::run_crossval(data.dataset, data.pool, cv);
  save_checkpoints(run, result, "");
  run.finish();
  return 0;
}

std::map<int, uemit::PretrainedAgent> load_checkpoints(const fs::path& dir, double& mitigation_minutes) {
  std::map<int, uemit::PretrainedAgent> out;
  for (int k = 1; k <= uemit::kNumParts; ++k) {
    const auto path = dir / ("split_" + std::to_string(k) + ".json");
    if (!fs::exists(path)) continue;
    std::ifstream in(path);
    const auto j = json::parse(in);
    uemit::PretrainedAgent p{uemit::agent_from_json(j), j.at("config").value("training_cost_node_hours", 0.0)};
    mitigation_minutes = j.at("config").value("mitigation_cost_minutes", mitigation_minutes);
    out.emplace(k, std::move(p));
  }
  if (out.empty()) throw std::runtime_error("no split_<k>.json checkpoints in " + dir.string());
  return out;
}

int cmd_evaluate(const Common& common, std::vector<double> costs, const std::string& checkpoints, bool rl) {
  Run run(common, rl ? "evaluate" : "baselines");
  const auto data = load(run);
  std::map<int, uemit::PretrainedAgent> pretrained;
  if (!checkpoints.empty()) {
    double m = run.config().env.mitigation.mitigation_cost_minutes;
    pretrained = load_checkpoints(checkpoints, m);
    costs = {m};
  }
  if (costs.empty()) costs = run.config().evaluation.mitigation_costs_minutes;
  std::vector<uemit::CostReport> reports;
  for (double m : costs) {
    auto cv = run.config().crossval();
    cv.env.mitigation.mitigation_cost_minutes = m;
    cv.run_rl = rl;
    cv.pretrained = pretrained;
    cv.log = run.logger();
    cv.search.log = run.logger();
    run.log("mitigation cost " + num(m) + " node-minutes");
    const auto result = uemit::run_crossval(data.dataset, data.pool, cv);
    const auto tag = cost_tag(m);
    run.write("report_" + tag + ".csv", result.report.to_csv());
    run.write("metrics_" + tag + ".csv", result.report.metrics_csv());
    if (rl && pretrained.empty()) {
      const auto saved = run.config().env.mitigation.mitigation_cost_minutes;
      run.config().env.mitigation.mitigation_cost_minutes = m;
      save_checkpoints(run, result, tag + "_");
      run.config().env.mitigation.mitigation_cost_minutes = saved;
    }
    json thresholds = json::array();
    for (const auto& art : result.splits) {
      if (art.threshold)
        thresholds.push_back({{"split", art.split.index},
                              {"optimal", art.threshold->optimal.threshold},
                              {"offset_2pct", art.threshold->offset_2pct.threshold},
                              {"offset_5pct", art.threshold->offset_5pct.threshold}});
    }
    run.extra()["thresholds_" + tag] = thresholds;
    reports.push_back(result.report);
  }
  run.write("cost_breakdown.csv", uemit::cost_breakdown_csv(reports));
  run.finish();
  return 0;
}

struct ReportLine {
  std::string policy;
  double ue = 0, mit = 0;
};

int cmd_report(const std::string& run_dir) {
  std::map<double, std::vector<ReportLine>> by_cost;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("report_", 0) != 0 || entry.path().extension() != ".csv") continue;
    const double minutes = std::stod(name.substr(7, name.find("min") - 7));
    std::ifstream in(entry.path());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      if (f.size() < 4 || f[1] != "all") continue;
      by_cost[minutes].push_back({f[0], std::stod(f[2]), std::stod(f[3])});
    }
  }
  if (by_cost.empty()) {
    std::cerr << "no report_<cost>min.csv files in " << run_dir << '\n';
    return 1;
  }
  std::ostringstream out;
  double max_total = 0;
  for (const auto& [m, lines] : by_cost)
    for (const auto& l : lines) max_total = std::max(max_total, l.ue + l.mit);
  for (const auto& [m, lines] : by_cost) {
    out << "mitigation cost " << num(m) << " node-minutes (U = UE cost, M = mitigation cost)\n";
    const auto never = std::find_if(lines.begin(), lines.end(), [](const auto& l) { return l.policy == "never"; });
    for (const auto& l : lines) {
      const int width = 50;
      const int u = max_total > 0 ? static_cast<int>(std::lround(width * l.ue / max_total)) : 0;
      const int mm = max_total > 0 ? static_cast<int>(std::lround(width * l.mit / max_total)) : 0;
      char head[96];
      std::snprintf(head, sizeof head, "  %-13s %12.2f  ", l.policy.c_str(), l.ue + l.mit);
      out << head << std::string(static_cast<std::size_t>(u), 'U') << std::string(static_cast<std::size_t>(mm), 'M');
      if (never != lines.end() && never->ue + never->mit > 0 && l.policy != "never") {
        char pct[48];
        std::snprintf(pct, sizeof pct, "  (%+.1f%% vs never)", 100.0 * ((l.ue + l.mit) / (never->ue + never->mit) - 1.0));
        out << pct;
      }
      out << '\n';
    }
    out << '\n';
  }
  const auto text = out.str();
  std::ofstream(fs::path(run_dir) / "summary.txt") << text;
  std::cout << text;
  return 0;
}

int cmd_heatmap(const Common& common, const std::string& checkpoint, int split_index) {
  Run run(common, "heatmap");
  const auto data = load(run);
  std::ifstream in(checkpoint);
  if (!in) throw std::runtime_error("cannot read checkpoint " + checkpoint);
  const auto j = json::parse(in);
  const auto agent = uemit::agent_from_json(j);
  auto& env = run.config().env;
  env.mitigation.mitigation_cost_minutes =
      j.at("config").value("mitigation_cost_minutes", env.mitigation.mitigation_cost_minutes);
  const auto plan = uemit::build_splits(data.dataset.span());
  if (split_index < 1 || split_index > uemit::kNumParts) throw std::invalid_argument("--split must lie in 1..6");
  const auto& split = plan.splits[static_cast<std::size_t>(split_index - 1)];
  auto cv = run.config().crossval();
  auto fp = cv.forest;
  fp.seed = uemit::derive_seed(cv.forest.seed, static_cast<std::uint64_t>(split_index));
  const uemit::Interval fit{split.train.begin, split.validation.end};
  const auto forest = uemit::train_rf(uemit::rf_training_set(data.dataset, fit), fp);
  const auto probs = uemit::predict_all(forest, data.dataset, split.test);
  const auto h = uemit::decision_heatmap(agent.policy(), probs, data.dataset, data.pool, split.test, env,
                                         cv.eval_seed);
  run.write("heatmap_split_" + std::to_string(split_index) + ".csv", h.to_csv());
  run.finish();
  return 0;
}

int cmd_features(const Common& common) {
  Run run(common, "features export");
  const auto data = load(run);
  std::ostringstream out;
  out << "node_id,timestamp,event_index,ue";
  for (auto n : uemit::StateFeatures::names()) out << ',' << n;
  out << '\n';
  const auto& nodes = data.dataset.nodes();
  const auto& env = run.config().env;
  const auto span = data.dataset.span();
  uemit::replay_policy(
      [&](const uemit::DecisionContext& ctx) {
        out << nodes[ctx.node].timeline.node_id << ',' << uemit::format_iso8601(ctx.time) << ',' << ctx.event_index
            << ",0";
        for (double v : ctx.state->to_array()) out << ',' << num(v);
        out << '\n';
        return 0;
      },
      data.dataset, data.pool, span, env, run.config().evaluation.eval_seed);
  run.write("features.csv", out.str());
  run.finish();
  return 0;
}

int cmd_sensitivity(const Common& common, std::vector<double> factors, bool rl) {
  Run run(common, "sensitivity");
  const auto data = load(run);
  if (factors.empty()) factors = run.config().evaluation.sensitivity_factors;
  auto cv = run.config().crossval();
  cv.run_rl = rl;
  cv.log = run.logger();
  cv.search.log = run.logger();
  const auto points = uemit::job_scale_sensitivity(data.dataset, data.pool, cv, factors);
  run.write("sensitivity.csv", uemit::sensitivity_csv(points));
  run.finish();
  return 0;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "YAML run configuration")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "Output directory (overrides UEMIT_OUT and the config)");
  app->add_option("--seed", c.seed, "Base seed");
  app->add_option("--jobs", c.jobs, "Concurrent training candidates")->check(CLI::PositiveNumber);
  app->add_option("--episodes", c.episodes, "Training episodes per agent")->check(CLI::NonNegativeNumber);
  app->add_option("--mitigation-cost", c.mitigation_cost, "Mitigation cost in node-minutes")->check(CLI::PositiveNumber);
  app->add_flag("-v,--verbose", c.verbose, "Progress on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UE mitigation: synthetic logs, training and cost-benefit evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(UEMIT_VERSION));
  Common common;

  auto* synth = app.add_subcommand("synth", "Generate synthetic error, job and retirement logs");
  add_common(synth, common);

  auto* train = app.add_subcommand("train", "Hyperparameter search and training for every split");
  add_common(train, common);

  std::vector<double> costs;
  std::string checkpoints;
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated cost report for all policies");
  add_common(evaluate, common);
  evaluate->add_option("--mitigation-costs", costs, "Node-minute settings to sweep")->delimiter(',');
  evaluate->add_option("--checkpoints", checkpoints, "Directory with split_<k>.json from train")
      ->check(CLI::ExistingDirectory);

  auto* baselines = app.add_subcommand("baselines", "Cost report for the non-learning policies");
  add_common(baselines, common);
  baselines->add_option("--mitigation-costs", costs, "Node-minute settings to sweep")->delimiter(',');

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Summarize report CSVs of a run directory as text bars");
  report->add_option("--run", run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  std::string checkpoint;
  int split = 6;
  auto* heatmap = app.add_subcommand("heatmap", "Agent decisions by UE cost and forest probability");
  add_common(heatmap, common);
  heatmap->add_option("--checkpoint", checkpoint, "Agent checkpoint")->required()->check(CLI::ExistingFile);
  heatmap->add_option("--split", split, "Split whose test interval is replayed (1-6)");

  auto* features = app.add_subcommand("features", "Feature utilities");
  auto* features_export = features->add_subcommand("export", "Write per-event feature vectors");
  features->require_subcommand(1);
  add_common(features_export, common);

  std::vector<double> factors;
  bool no_rl = false;
  auto* sensitivity = app.add_subcommand("sensitivity", "Job-size scaling study");
  add_common(sensitivity, common);
  sensitivity->add_option("--factors", factors, "Job scale factors")->delimiter(',');
  sensitivity->add_flag("--no-rl", no_rl, "Skip agent training");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*synth) return cmd_synth(common);
    if (*train) return cmd_train(common);
    if (*evaluate) return cmd_evaluate(common, costs, checkpoints, true);
    if (*baselines) return cmd_evaluate(common, costs, "", false);
    if (*report) return cmd_report(run_dir);
    if (*heatmap) return cmd_heatmap(common, checkpoint, split);
    if (*features_export) return cmd_features(common);
    if (*sensitivity) return cmd_sensitivity(common, factors, !no_rl);
  } catch (const std::exception& e) {
    std::cerr << "uemit: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
