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

#include <cstdint>
#include <string>
#include <vector>

#include "uemit/logs.hpp"
#include "uemit/rng.hpp"
#include "uemit/time.hpp"

namespace uemit {

/// Log-normal marginal, parameterized by its median, clipped to [min, max].
struct LognormalSpec {
  double median = 1.0;
  double sigma = 1.0;
  double min = 0.0;
  double max = 1e300;
};

/// Knobs of the synthetic error/job log generator. Rates are per day.
///
/// Background CEs: each DIMM alternates between a quiet state (rate
/// ce_base_rate / n_dimms_per_node) and a burst state (rate multiplied by
/// burst_intensity). Bursts start at burst_onset_rate per DIMM and last an
/// exponential time with mean burst_mean_hours.
///
/// UEs: ue_count_target "primary" UEs are placed on random nodes at least 168 h
/// apart per node; each is followed by a geometric number of burst UEs (mean
/// ue_followers_mean) within the next 144 h, so burst reduction recovers
/// exactly ue_count_target UEs. A fraction signal_strength of the primaries is
/// preceded by an escalating CE storm on the failing DIMM in the prior 72 h.
struct SynthConfig {
  std::int64_t n_nodes = 50;
  std::int64_t n_dimms_per_node = 8;
  double span_months = 3.0;
  Timestamp start = 1412121600;  // 2014-10-01T00:00:00Z

  double ce_base_rate = 0.5;
  double burst_intensity = 25.0;
  double burst_onset_rate = 1.0 / 120.0;
  double burst_mean_hours = 4.0;
  double location_sample_fraction = 0.5;

  std::int64_t ue_count_target = 67;
  double ue_followers_mean = 4.0;
  double over_temperature_fraction = 0.06;

  double signal_strength = 0.8;
  double signal_events_mean = 25.0;
  double signal_ce_mean = 6.0;
  double signal_warning_probability = 0.3;

  double boot_rate = 1.0 / 30.0;
  double warning_rate = 1.0 / 365.0;
  std::int64_t n_retirements = 0;

  LognormalSpec job_nodes{4.0, 1.5, 1.0, 2048.0};
  LognormalSpec job_duration_hours{4.0, 1.2, 0.05, 72.0};
  std::int64_t job_lanes = 8;

  std::uint64_t seed = 1;

  /// Throws std::invalid_argument when a field is out of range or the UE
  /// target does not fit (more than one counted UE per node-week).
  void validate() const;
  Interval span() const;
};

struct SynthData {
  Interval span;
  std::vector<LogEvent> events;  // sorted by (node_id, timestamp)
  std::vector<JobRecord> jobs;   // sorted by start_time
  std::vector<Retirement> retirements;
  /// Times of the counted (post-reduction) UEs and whether each carries the
  /// planted precursor signal; ground truth for generator tests.
  struct PlantedUe {
    std::string node_id;
    Timestamp time = 0;
    bool signalled = false;
  };
  std::vector<PlantedUe> planted;
};

struct SynthLogs {
  std::string errors_csv;
  std::string jobs_csv;
  std::string retirements_csv;
};

SynthData generate(const SynthConfig& config);

/// generate() rendered in the on-disk formats.
SynthLogs generate_logs(const SynthConfig& config);

/// Back-to-back jobs on `job_lanes` parallel lanes covering `span`, with
/// log-normal node counts and durations.
std::vector<JobRecord> generate_jobs(const SynthConfig& config, const Interval& span, Rng& rng);

std::string node_name(std::int64_t index);

}  // namespace uemit
