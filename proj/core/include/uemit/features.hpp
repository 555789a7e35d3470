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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uemit/logs.hpp"
#include "uemit/time.hpp"

namespace uemit {

inline constexpr std::size_t kFeatureCount = 15;
/// Features derived from the error log alone (all but potential_ue_cost).
inline constexpr std::size_t kLogFeatureCount = 14;

/// Per-node observation at one merged event.
struct StateFeatures {
  double ce_since_last_event = 0;
  double ce_total = 0;
  double ce_total_var_1m = 0;
  double ce_total_var_1h = 0;
  double n_ranks_with_ce = 0;
  double n_banks_with_ce = 0;
  double n_cols_with_ce = 0;
  double n_rows_with_ce = 0;
  double n_dimms_with_ce = 0;
  double ue_warnings_total = 0;
  double time_since_boot = 0;  // hours
  double n_boots = 0;
  double n_boots_var_1m = 0;
  double n_boots_var_1h = 0;
  double potential_ue_cost = 0;  // node-hours

  std::array<double, kFeatureCount> to_array() const;
  static StateFeatures from_array(std::span<const double, kFeatureCount> values);
  static const std::array<std::string_view, kFeatureCount>& names();

  friend bool operator==(const StateFeatures&, const StateFeatures&) = default;
};

inline constexpr std::size_t kPotentialUeCostIndex = 14;

struct MitigationPolicyConfig {
  double mitigation_cost_minutes = 2.0;  // node-minutes per mitigation
  bool restartable = true;

  double mitigation_cost_hours() const { return mitigation_cost_minutes / 60.0; }
  void validate() const;
};

/// value_now / value_then, or 0 when value_then is 0.
double feature_variation(double value_now, double value_then);

/// nodes x lost wallclock hours.
double potential_ue_cost(double num_nodes, double lost_wallclock_hours);

/// What the environment knows about the job running on a node.
struct JobState {
  double num_nodes = 1.0;
  Timestamp job_start = 0;
  std::optional<Timestamp> last_mitigation;
  bool restartable = true;

  /// Start of the work that a UE at `now` would destroy.
  Timestamp loss_origin() const;
  double lost_wallclock_hours(Timestamp now) const;
  double potential_ue_cost(Timestamp now) const;
};

/// Incrementally computes the log-derived features for every event of a
/// timeline; potential_ue_cost is left at 0. `origin` stands in for the last
/// boot before any boot has been observed (usually the start of the log).
std::vector<StateFeatures> compute_log_features(const NodeTimeline& timeline, Timestamp origin);

/// Features at one event, including potential_ue_cost from `job`.
StateFeatures compute_features(const NodeTimeline& timeline, std::size_t event_index, const JobState& job,
                               Timestamp origin);

/// Per-feature standardization fitted on a training set. potential_ue_cost is
/// passed through log1p before standardizing.
class Normalizer {
 public:
  Normalizer();
  void fit(std::span<const StateFeatures> samples);
  std::array<double, kFeatureCount> apply(const StateFeatures& features) const;

  const std::array<double, kFeatureCount>& mean() const { return mean_; }
  const std::array<double, kFeatureCount>& scale() const { return scale_; }
  void set(const std::array<double, kFeatureCount>& mean, const std::array<double, kFeatureCount>& scale);

  static std::array<double, kFeatureCount> transform(const StateFeatures& features);

 private:
  std::array<double, kFeatureCount> mean_{};
  std::array<double, kFeatureCount> scale_{};
};

}  // namespace uemit
