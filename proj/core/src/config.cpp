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

#include "uemit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

namespace uemit {

namespace {

// A YAML mapping whose keys must all be consumed.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw std::invalid_argument("config: '" + path_ + "' must be a mapping");
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const auto v = node_[key];
    if (!v || v.IsNull()) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw std::invalid_argument("config: bad value for '" + where(key) + "'");
    }
  }

  void get_time(const char* key, std::optional<Timestamp>& out) {
    std::string s;
    get(key, s);
    if (!s.empty()) out = parse_iso8601(s);
  }

  Section sub(const char* key) {
    used_.insert(key);
    if (!node_ || node_.IsNull()) return Section(YAML::Node(), where(key));
    return Section(node_[key], where(key));
  }

  void finish() const {
    if (!node_ || node_.IsNull()) return;
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!used_.count(k)) throw std::invalid_argument("config: unknown key '" + where(k.c_str()) + "'");
    }
  }

 private:
  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

void read_lognormal(Section s, LognormalSpec& spec) {
  s.get("median", spec.median);
  s.get("sigma", spec.sigma);
  s.get("min", spec.min);
  s.get("max", spec.max);
  s.finish();
}

void read_hyperparameters(Section s, Hyperparameters& hp) {
  s.get("learning_rate", hp.learning_rate);
  s.get("gamma", hp.gamma);
  s.get("batch_size", hp.batch_size);
  s.get("train_frequency", hp.train_frequency);
  s.get("target_sync_frequency", hp.target_sync_frequency);
  s.get("alpha", hp.alpha);
  s.get("beta_start", hp.beta_start);
  s.get("beta_end", hp.beta_end);
  s.get("epsilon_start", hp.epsilon_start);
  s.get("epsilon_end", hp.epsilon_end);
  s.get("epsilon_decay_steps", hp.epsilon_decay_steps);
  s.get("buffer_capacity", hp.buffer_capacity);
  s.get("priority_epsilon", hp.priority_epsilon);
  s.get("learning_starts", hp.learning_starts);
  s.get("reward_scale", hp.reward_scale);
  s.get("max_grad_norm", hp.max_grad_norm);
  s.get("hidden", hp.hidden);
  s.finish();
}

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  // Keep doubles recognizable as floats in YAML.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename T>
std::string list(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += num(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s + "]";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string mode_name(ThresholdMode m) { return m == ThresholdMode::test ? "test" : "validation"; }

}  // namespace

void RunConfig::validate() const {
  env.mitigation.validate();
  if (!(env.job_scale > 0.0)) throw std::invalid_argument("config: job_scale must be > 0");
  if (episodes < 0) throw std::invalid_argument("config: episodes must be >= 0");
  if (search.n_first < 1 || search.n_second < 0) throw std::invalid_argument("config: bad search sizes");
  if (search.jobs < 1) throw std::invalid_argument("config: search.jobs must be >= 1");
  if (!(search.warm_fraction >= 0.0 && search.warm_fraction <= 1.0))
    throw std::invalid_argument("config: warm_fraction must lie in [0, 1]");
  search.space.validate();
  search.base.validate();
  forest.validate();
  for (double c : evaluation.mitigation_costs_minutes)
    if (!(c > 0.0)) throw std::invalid_argument("config: mitigation costs must be > 0");
  for (double f : evaluation.sensitivity_factors)
    if (!(f > 0.0)) throw std::invalid_argument("config: sensitivity factors must be > 0");
  if (data.span_start && data.span_end && *data.span_end <= *data.span_start)
    throw std::invalid_argument("config: span_end must follow span_start");
  if (!(data.retirement_window_hours >= 0.0)) throw std::invalid_argument("config: retirement window must be >= 0");
  synth.validate();
}

CrossvalConfig RunConfig::crossval() const {
  CrossvalConfig c;
  c.env = env;
  c.eval_seed = evaluation.eval_seed;
  c.search = search;
  c.search.episodes = episodes;
  c.search.seed = derive_seed(seed, 101);
  c.forest = forest;
  c.forest.seed = derive_seed(seed, 102);
  c.threshold_mode = evaluation.threshold_mode;
  return c;
}

RunConfig run_config_from_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig c;
  Section s(root, "");
  s.get("seed", c.seed);
  std::string out = c.output_dir.string();
  s.get("output_dir", out);
  c.output_dir = out;
  s.get("episodes", c.episodes);

  {
    auto d = s.sub("data");
    std::string e = c.data.errors.string(), j = c.data.jobs.string(), r = c.data.retirements.string();
    d.get("errors", e);
    d.get("jobs", j);
    d.get("retirements", r);
    c.data.errors = e;
    c.data.jobs = j;
    c.data.retirements = r;
    d.get_time("span_start", c.data.span_start);
    d.get_time("span_end", c.data.span_end);
    d.get("burst_reduction", c.data.burst_reduction);
    d.get("retirement_window_hours", c.data.retirement_window_hours);
    d.finish();
  }
  {
    auto m = s.sub("mitigation");
    m.get("cost_minutes", c.env.mitigation.mitigation_cost_minutes);
    m.get("restartable", c.env.mitigation.restartable);
    m.get("job_scale", c.env.job_scale);
    m.finish();
  }
  {
    auto t = s.sub("training");
    read_hyperparameters(t.sub("hyperparameters"), c.search.base);
    auto cost = t.sub("cost");
    cost.get("seconds_per_env_step", c.search.cost.seconds_per_env_step);
    cost.get("seconds_per_gradient_step", c.search.cost.seconds_per_gradient_step);
    cost.get("nodes_used", c.search.cost.nodes_used);
    cost.get("use_wallclock", c.search.cost.use_wallclock);
    cost.finish();
    t.finish();
  }
  {
    auto r = s.sub("search");
    r.get("n_first", c.search.n_first);
    r.get("n_second", c.search.n_second);
    r.get("jobs", c.search.jobs);
    r.get("warm_fraction", c.search.warm_fraction);
    auto sp = r.sub("space");
    sp.get("learning_rate_min", c.search.space.learning_rate_min);
    sp.get("learning_rate_max", c.search.space.learning_rate_max);
    sp.get("gammas", c.search.space.gammas);
    sp.get("batch_sizes", c.search.space.batch_sizes);
    sp.get("sync_min", c.search.space.sync_min);
    sp.get("sync_max", c.search.space.sync_max);
    sp.get("alpha_min", c.search.space.alpha_min);
    sp.get("alpha_max", c.search.space.alpha_max);
    sp.get("beta_start_min", c.search.space.beta_start_min);
    sp.get("beta_start_max", c.search.space.beta_start_max);
    sp.finish();
    r.finish();
  }
  {
    auto f = s.sub("forest");
    f.get("n_trees", c.forest.n_trees);
    f.get("max_depth", c.forest.max_depth);
    f.get("max_features", c.forest.max_features);
    f.get("undersample_ratio", c.forest.undersample_ratio);
    f.get("min_samples_leaf", c.forest.min_samples_leaf);
    f.get("threads", c.forest.threads);
    f.finish();
  }
  {
    auto e = s.sub("evaluation");
    e.get("eval_seed", c.evaluation.eval_seed);
    std::string mode = mode_name(c.evaluation.threshold_mode);
    e.get("threshold_mode", mode);
    if (mode == "test") {
      c.evaluation.threshold_mode = ThresholdMode::test;
    } else if (mode == "validation") {
      c.evaluation.threshold_mode = ThresholdMode::validation;
    } else {
      throw std::invalid_argument("config: threshold_mode must be 'test' or 'validation'");
    }
    e.get("mitigation_costs_minutes", c.evaluation.mitigation_costs_minutes);
    e.get("sensitivity_factors", c.evaluation.sensitivity_factors);
    e.finish();
  }
  {
    auto y = s.sub("synth");
    auto& g = c.synth;
    y.get("n_nodes", g.n_nodes);
    y.get("n_dimms_per_node", g.n_dimms_per_node);
    y.get("span_months", g.span_months);
    std::optional<Timestamp> start;
    y.get_time("start", start);
    if (start) g.start = *start;
    y.get("ce_base_rate", g.ce_base_rate);
    y.get("burst_intensity", g.burst_intensity);
    y.get("burst_onset_rate", g.burst_onset_rate);
    y.get("burst_mean_hours", g.burst_mean_hours);
    y.get("location_sample_fraction", g.location_sample_fraction);
    y.get("ue_count_target", g.ue_count_target);
    y.get("ue_followers_mean", g.ue_followers_mean);
    y.get("over_temperature_fraction", g.over_temperature_fraction);
    y.get("signal_strength", g.signal_strength);
    y.get("signal_events_mean", g.signal_events_mean);
    y.get("signal_ce_mean", g.signal_ce_mean);
    y.get("signal_warning_probability", g.signal_warning_probability);
    y.get("boot_rate", g.boot_rate);
    y.get("warning_rate", g.warning_rate);
    y.get("n_retirements", g.n_retirements);
    read_lognormal(y.sub("job_nodes"), g.job_nodes);
    read_lognormal(y.sub("job_duration_hours"), g.job_duration_hours);
    y.get("job_lanes", g.job_lanes);
    y.finish();
  }
  s.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_yaml(ss.str());
}

std::string run_config_to_yaml(const RunConfig& c) {
  std::ostringstream o;
  const auto& hp = c.search.base;
  const auto& g = c.synth;
  o << "seed: " << c.seed << "\n"
    << "output_dir: " << quote(c.output_dir.string()) << "\n"
    << "episodes: " << c.episodes << "\n"
    << "data:\n"
    << "  errors: " << quote(c.data.errors.string()) << "\n"
    << "  jobs: " << quote(c.data.jobs.string()) << "\n"
    << "  retirements: " << quote(c.data.retirements.string()) << "\n";
  if (c.data.span_start) o << "  span_start: " << quote(format_iso8601(*c.data.span_start)) << "\n";
  if (c.data.span_end) o << "  span_end: " << quote(format_iso8601(*c.data.span_end)) << "\n";
  o << "  burst_reduction: " << (c.data.burst_reduction ? "true" : "false") << "\n"
    << "  retirement_window_hours: " << num(c.data.retirement_window_hours) << "\n"
    << "mitigation:\n"
    << "  cost_minutes: " << num(c.env.mitigation.mitigation_cost_minutes) << "\n"
    << "  restartable: " << (c.env.mitigation.restartable ? "true" : "false") << "\n"
    << "  job_scale: " << num(c.env.job_scale) << "\n"
    << "training:\n"
    << "  hyperparameters:\n"
    << "    learning_rate: " << num(hp.learning_rate) << "\n"
    << "    gamma: " << num(hp.gamma) << "\n"
    << "    batch_size: " << hp.batch_size << "\n"
    << "    train_frequency: " << hp.train_frequency << "\n"
    << "    target_sync_frequency: " << hp.target_sync_frequency << "\n"
    << "    alpha: " << num(hp.alpha) << "\n"
    << "    beta_start: " << num(hp.beta_start) << "\n"
    << "    beta_end: " << num(hp.beta_end) << "\n"
    << "    epsilon_start: " << num(hp.epsilon_start) << "\n"
    << "    epsilon_end: " << num(hp.epsilon_end) << "\n"
    << "    epsilon_decay_steps: " << hp.epsilon_decay_steps << "\n"
    << "    buffer_capacity: " << hp.buffer_capacity << "\n"
    << "    priority_epsilon: " << num(hp.priority_epsilon) << "\n"
    << "    learning_starts: " << hp.learning_starts << "\n"
    << "    reward_scale: " << num(hp.reward_scale) << "\n"
    << "    max_grad_norm: " << num(hp.max_grad_norm) << "\n"
    << "    hidden: " << list(hp.hidden) << "\n"
    << "  cost:\n"
    << "    seconds_per_env_step: " << num(c.search.cost.seconds_per_env_step) << "\n"
    << "    seconds_per_gradient_step: " << num(c.search.cost.seconds_per_gradient_step) << "\n"
    << "    nodes_used: " << num(c.search.cost.nodes_used) << "\n"
    << "    use_wallclock: " << (c.search.cost.use_wallclock ? "true" : "false") << "\n"
    << "search:\n"
    << "  n_first: " << c.search.n_first << "\n"
    << "  n_second: " << c.search.n_second << "\n"
    << "  jobs: " << c.search.jobs << "\n"
    << "  warm_fraction: " << num(c.search.warm_fraction) << "\n"
    << "  space:\n"
    << "    learning_rate_min: " << num(c.search.space.learning_rate_min) << "\n"
    << "    learning_rate_max: " << num(c.search.space.learning_rate_max) << "\n"
    << "    gammas: " << list(c.search.space.gammas) << "\n"
    << "    batch_sizes: " << list(c.search.space.batch_sizes) << "\n"
    << "    sync_min: " << c.search.space.sync_min << "\n"
    << "    sync_max: " << c.search.space.sync_max << "\n"
    << "    alpha_min: " << num(c.search.space.alpha_min) << "\n"
    << "    alpha_max: " << num(c.search.space.alpha_max) << "\n"
    << "    beta_start_min: " << num(c.search.space.beta_start_min) << "\n"
    << "    beta_start_max: " << num(c.search.space.beta_start_max) << "\n"
    << "forest:\n"
    << "  n_trees: " << c.forest.n_trees << "\n"
    << "  max_depth: " << c.forest.max_depth << "\n"
    << "  max_features: " << c.forest.max_features << "\n"
    << "  undersample_ratio: " << num(c.forest.undersample_ratio) << "\n"
    << "  min_samples_leaf: " << c.forest.min_samples_leaf << "\n"
    << "  threads: " << c.forest.threads << "\n"
    << "evaluation:\n"
    << "  eval_seed: " << c.evaluation.eval_seed << "\n"
    << "  threshold_mode: " << mode_name(c.evaluation.threshold_mode) << "\n"
    << "  mitigation_costs_minutes: " << list(c.evaluation.mitigation_costs_minutes) << "\n"
    << "  sensitivity_factors: " << list(c.evaluation.sensitivity_factors) << "\n"
    << "synth:\n"
    << "  n_nodes: " << g.n_nodes << "\n"
    << "  n_dimms_per_node: " << g.n_dimms_per_node << "\n"
    << "  span_months: " << num(g.span_months) << "\n"
    << "  start: " << quote(format_iso8601(g.start)) << "\n"
    << "  ce_base_rate: " << num(g.ce_base_rate) << "\n"
    << "  burst_intensity: " << num(g.burst_intensity) << "\n"
    << "  burst_onset_rate: " << num(g.burst_onset_rate) << "\n"
    << "  burst_mean_hours: " << num(g.burst_mean_hours) << "\n"
    << "  location_sample_fraction: " << num(g.location_sample_fraction) << "\n"
    << "  ue_count_target: " << g.ue_count_target << "\n"
    << "  ue_followers_mean: " << num(g.ue_followers_mean) << "\n"
    << "  over_temperature_fraction: " << num(g.over_temperature_fraction) << "\n"
    << "  signal_strength: " << num(g.signal_strength) << "\n"
    << "  signal_events_mean: " << num(g.signal_events_mean) << "\n"
    << "  signal_ce_mean: " << num(g.signal_ce_mean) << "\n"
    << "  signal_warning_probability: " << num(g.signal_warning_probability) << "\n"
    << "  boot_rate: " << num(g.boot_rate) << "\n"
    << "  warning_rate: " << num(g.warning_rate) << "\n"
    << "  n_retirements: " << g.n_retirements << "\n"
    << "  job_nodes: {median: " << num(g.job_nodes.median) << ", sigma: " << num(g.job_nodes.sigma)
    << ", min: " << num(g.job_nodes.min) << ", max: " << num(g.job_nodes.max) << "}\n"
    << "  job_duration_hours: {median: " << num(g.job_duration_hours.median)
    << ", sigma: " << num(g.job_duration_hours.sigma) << ", min: " << num(g.job_duration_hours.min)
    << ", max: " << num(g.job_duration_hours.max) << "}\n"
    << "  job_lanes: " << g.job_lanes << "\n";
  return o.str();
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(run_config_to_yaml(config))));
  return buf;
}

LoadedData load_data(const DataConfig& d) {
  auto events = ingest_error_log(d.errors);
  auto jobs = ingest_job_log(d.jobs);
  std::vector<Retirement> retirements;
  if (!d.retirements.empty() && std::filesystem::exists(d.retirements)) retirements = ingest_retirements(d.retirements);

  std::optional<Timestamp> begin = d.span_start, end = d.span_end;
  const auto manifest = d.errors.parent_path() / "manifest.json";
  if ((!begin || !end) && std::filesystem::exists(manifest)) {
    std::ifstream in(manifest);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.contains("span")) {
      if (!begin) begin = parse_iso8601(j["span"].at("start").get<std::string>());
      if (!end) end = parse_iso8601(j["span"].at("end").get<std::string>());
    }
  }
  if (!begin || !end) {
    if (events.empty()) throw std::invalid_argument("error log is empty and no span was configured");
    Timestamp lo = events.front().timestamp, hi = lo;
    for (const auto& e : events) {
      lo = std::min(lo, e.timestamp);
      hi = std::max(hi, e.timestamp);
    }
    if (!begin) begin = lo;
    if (!end) end = hi + 1;
  }
  if (*end <= *begin) throw std::invalid_argument("log span is empty");

  TimelineOptions opts;
  opts.reduce_bursts = d.burst_reduction;
  opts.retirement_window_seconds = static_cast<std::int64_t>(d.retirement_window_hours * kSecondsPerHour);
  auto timelines = build_timelines(events, retirements, opts);
  std::size_t ues = 0;
  for (const auto& t : timelines)
    for (const auto& e : t.events) ues += e.ue ? 1 : 0;
  return {Dataset(std::move(timelines), Interval{*begin, *end}), JobPool(std::move(jobs)), events.size(), ues};
}

}  // namespace uemit
