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

#include "uemit/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace uemit {

std::array<double, kFeatureCount> StateFeatures::to_array() const {
  return {ce_since_last_event, ce_total,       ce_total_var_1m, ce_total_var_1h, n_ranks_with_ce,
          n_banks_with_ce,     n_cols_with_ce, n_rows_with_ce,  n_dimms_with_ce, ue_warnings_total,
          time_since_boot,     n_boots,        n_boots_var_1m,  n_boots_var_1h,  potential_ue_cost};
}

StateFeatures StateFeatures::from_array(std::span<const double, kFeatureCount> v) {
  StateFeatures f;
  f.ce_since_last_event = v[0];
  f.ce_total = v[1];
  f.ce_total_var_1m = v[2];
  f.ce_total_var_1h = v[3];
  f.n_ranks_with_ce = v[4];
  f.n_banks_with_ce = v[5];
  f.n_cols_with_ce = v[6];
  f.n_rows_with_ce = v[7];
  f.n_dimms_with_ce = v[8];
  f.ue_warnings_total = v[9];
  f.time_since_boot = v[10];
  f.n_boots = v[11];
  f.n_boots_var_1m = v[12];
  f.n_boots_var_1h = v[13];
  f.potential_ue_cost = v[14];
  return f;
}

const std::array<std::string_view, kFeatureCount>& StateFeatures::names() {
  static const std::array<std::string_view, kFeatureCount> kNames = {
      "ce_since_last_event", "ce_total",         "ce_total_var_1m", "ce_total_var_1h",
      "n_ranks_with_ce",     "n_banks_with_ce",  "n_cols_with_ce",  "n_rows_with_ce",
      "n_dimms_with_ce",     "ue_warnings_total", "time_since_boot", "n_boots",
      "n_boots_var_1m",      "n_boots_var_1h",   "potential_ue_cost"};
  return kNames;
}

void MitigationPolicyConfig::validate() const {
  if (!(mitigation_cost_minutes > 0.0)) throw std::invalid_argument("mitigation_cost must be > 0 node-minutes");
}

double feature_variation(double value_now, double value_then) {
  return value_then == 0.0 ? 0.0 : value_now / value_then;
}

double potential_ue_cost(double num_nodes, double lost_wallclock_hours) {
  return num_nodes * lost_wallclock_hours;
}

Timestamp JobState::loss_origin() const {
  if (restartable && last_mitigation && *last_mitigation > job_start) return *last_mitigation;
  return job_start;
}

double JobState::lost_wallclock_hours(Timestamp now) const {
  return std::max(0.0, to_hours(now - loss_origin()));
}

double JobState::potential_ue_cost(Timestamp now) const {
  return uemit::potential_ue_cost(num_nodes, lost_wallclock_hours(now));
}

namespace {

// Cumulative value of a step function sampled at events: value at the latest
// event at or before `t`, 0 if none.
class Lookback {
 public:
  Lookback(const std::vector<Timestamp>& times, const std::vector<double>& values, std::int64_t delta)
      : times_(times), values_(values), delta_(delta) {}

  double at(std::size_t i) {
    const Timestamp target = times_[i] - delta_;
    while (next_ <= i && times_[next_] <= target) ++next_;
    return next_ == 0 ? 0.0 : values_[next_ - 1];
  }

 private:
  const std::vector<Timestamp>& times_;
  const std::vector<double>& values_;
  std::int64_t delta_;
  std::size_t next_ = 0;
};

}  // namespace

std::vector<StateFeatures> compute_log_features(const NodeTimeline& timeline, Timestamp origin) {
  const auto& events = timeline.events;
  const std::size_t n = events.size();
  std::vector<Timestamp> times(n);
  std::vector<double> ce_cum(n), boot_cum(n);
  double ce = 0, boots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = events[i].timestamp;
    ce += static_cast<double>(events[i].ce_count);
    boots += static_cast<double>(events[i].boots);
    ce_cum[i] = ce;
    boot_cum[i] = boots;
  }

  Lookback ce_1m(times, ce_cum, kSecondsPerMinute), ce_1h(times, ce_cum, kSecondsPerHour);
  Lookback boot_1m(times, boot_cum, kSecondsPerMinute), boot_1h(times, boot_cum, kSecondsPerHour);

  std::set<std::tuple<std::string, std::int64_t>> ranks;
  std::set<std::tuple<std::string, std::int64_t, std::int64_t>> banks;
  std::set<std::tuple<std::string, std::int64_t, std::int64_t, std::int64_t>> rows, cols;
  std::set<std::string> dimms;
  double warnings = 0;
  Timestamp last_boot = origin;

  std::vector<StateFeatures> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = events[i];
    for (const auto& s : e.ce_sites) {
      const auto& l = s.location;
      ranks.emplace(s.dimm_id, l.rank);
      banks.emplace(s.dimm_id, l.rank, l.bank);
      rows.emplace(s.dimm_id, l.rank, l.bank, l.row);
      cols.emplace(s.dimm_id, l.rank, l.bank, l.column);
    }
    for (const auto& d : e.ce_dimms) dimms.insert(d);
    warnings += static_cast<double>(e.ue_warnings);
    if (e.boots > 0) last_boot = e.timestamp;

    auto& f = out[i];
    f.ce_since_last_event = static_cast<double>(e.ce_count);
    f.ce_total = ce_cum[i];
    f.ce_total_var_1m = feature_variation(ce_cum[i], ce_1m.at(i));
    f.ce_total_var_1h = feature_variation(ce_cum[i], ce_1h.at(i));
    f.n_ranks_with_ce = static_cast<double>(ranks.size());
    f.n_banks_with_ce = static_cast<double>(banks.size());
    f.n_cols_with_ce = static_cast<double>(cols.size());
    f.n_rows_with_ce = static_cast<double>(rows.size());
    f.n_dimms_with_ce = static_cast<double>(dimms.size());
    f.ue_warnings_total = warnings;
    f.time_since_boot = std::max(0.0, to_hours(e.timestamp - last_boot));
    f.n_boots = boot_cum[i];
    f.n_boots_var_1m = feature_variation(boot_cum[i], boot_1m.at(i));
    f.n_boots_var_1h = feature_variation(boot_cum[i], boot_1h.at(i));
  }
  return out;
}

StateFeatures compute_features(const NodeTimeline& timeline, std::size_t event_index, const JobState& job,
                               Timestamp origin) {
  if (event_index >= timeline.events.size()) throw std::out_of_range("compute_features: bad event index");
  NodeTimeline prefix{timeline.node_id, {timeline.events.begin(), timeline.events.begin() + event_index + 1}};
  auto f = compute_log_features(prefix, origin).back();
  f.potential_ue_cost = job.potential_ue_cost(timeline.events[event_index].timestamp);
  return f;
}

Normalizer::Normalizer() { scale_.fill(1.0); }

std::array<double, kFeatureCount> Normalizer::transform(const StateFeatures& features) {
  auto v = features.to_array();
  v[kPotentialUeCostIndex] = std::log1p(std::max(0.0, v[kPotentialUeCostIndex]));
  return v;
}

void Normalizer::fit(std::span<const StateFeatures> samples) {
  mean_.fill(0.0);
  scale_.fill(1.0);
  if (samples.empty()) return;
  std::array<double, kFeatureCount> sum{}, sq{};
  for (const auto& s : samples) {
    const auto v = transform(s);
    for (std::size_t k = 0; k < kFeatureCount; ++k) sum[k] += v[k];
  }
  const double n = static_cast<double>(samples.size());
  for (std::size_t k = 0; k < kFeatureCount; ++k) mean_[k] = sum[k] / n;
  for (const auto& s : samples) {
    const auto v = transform(s);
    for (std::size_t k = 0; k < kFeatureCount; ++k) sq[k] += (v[k] - mean_[k]) * (v[k] - mean_[k]);
  }
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const double sd = std::sqrt(sq[k] / n);
    scale_[k] = sd > 1e-12 ? sd : 1.0;
  }
}

std::array<double, kFeatureCount> Normalizer::apply(const StateFeatures& features) const {
  auto v = transform(features);
  for (std::size_t k = 0; k < kFeatureCount; ++k) v[k] = (v[k] - mean_[k]) / scale_[k];
  return v;
}

void Normalizer::set(const std::array<double, kFeatureCount>& mean, const std::array<double, kFeatureCount>& scale) {
  mean_ = mean;
  scale_ = scale;
}

}  // namespace uemit
