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

#include "uemit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace uemit {
namespace {

constexpr std::int64_t kSignalWindow = 72 * kSecondsPerHour;
constexpr std::int64_t kFollowerWindow = 144 * kSecondsPerHour;

enum Stream : std::uint64_t {
  kUeStream = 1,
  kJobStream = 2,
  kRetirementStream = 3,
  kNodeStreamBase = 1000,
};

double draw_lognormal(Rng& rng, const LognormalSpec& spec) {
  const double v = rng.lognormal(std::log(spec.median), spec.sigma);
  return std::clamp(v, spec.min, spec.max);
}

Timestamp draw_time(Rng& rng, const Interval& span) {
  return span.begin + static_cast<Timestamp>(rng.uniform_index(static_cast<std::uint64_t>(span.duration())));
}

std::string dimm_name(std::int64_t node, std::int64_t dimm) {
  return node_name(node) + "-d" + std::to_string(dimm);
}

Location random_location(Rng& rng) {
  return {static_cast<std::int64_t>(rng.uniform_index(2)), static_cast<std::int64_t>(rng.uniform_index(8)),
          static_cast<std::int64_t>(rng.uniform_index(32768)),
          static_cast<std::int64_t>(rng.uniform_index(1024))};
}

struct Dimm {
  std::vector<Location> weak_cells;
};

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SynthConfig: ") + what);
}

}  // namespace

std::string node_name(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "n%05lld", static_cast<long long>(index));
  return buf;
}

Interval SynthConfig::span() const {
  return {start, start + static_cast<Timestamp>(std::llround(span_months * kSecondsPerMonth))};
}

void SynthConfig::validate() const {
  check(n_nodes >= 1, "n_nodes must be >= 1");
  check(n_dimms_per_node >= 1, "n_dimms_per_node must be >= 1");
  check(span_months > 0.0, "span_months must be > 0");
  check(ce_base_rate >= 0.0, "ce_base_rate must be >= 0");
  check(burst_intensity >= 1.0, "burst_intensity must be >= 1");
  check(burst_onset_rate >= 0.0 && burst_mean_hours > 0.0, "bad burst process");
  check(location_sample_fraction >= 0.0 && location_sample_fraction <= 1.0, "location_sample_fraction in [0,1]");
  check(ue_count_target >= 1, "ue_count_target must be >= 1");
  check(ue_followers_mean >= 0.0, "ue_followers_mean must be >= 0");
  check(over_temperature_fraction >= 0.0 && over_temperature_fraction <= 1.0, "over_temperature_fraction in [0,1]");
  check(signal_strength >= 0.0 && signal_strength <= 1.0, "signal_strength in [0,1]");
  check(signal_events_mean >= 1.0 && signal_ce_mean >= 1.0, "signal means must be >= 1");
  check(signal_warning_probability >= 0.0 && signal_warning_probability <= 1.0, "signal_warning_probability in [0,1]");
  check(boot_rate >= 0.0 && warning_rate >= 0.0, "rates must be >= 0");
  check(n_retirements >= 0, "n_retirements must be >= 0");
  check(job_lanes >= 1, "job_lanes must be >= 1");
  check(job_nodes.median >= 1.0 && job_nodes.min >= 1.0 && job_nodes.max >= job_nodes.min, "bad job_nodes");
  check(job_duration_hours.median > 0.0 && job_duration_hours.min > 0.0 &&
            job_duration_hours.max >= job_duration_hours.min,
        "bad job_duration_hours");
  const std::int64_t weeks = span().duration() / kUeBurstWindowSeconds;
  check(ue_count_target <= n_nodes * weeks, "ue_count_target exceeds one counted UE per node-week");
}

std::vector<JobRecord> generate_jobs(const SynthConfig& config, const Interval& span, Rng& rng) {
  struct Pending {
    Timestamp start;
    std::int64_t lane;
    double hours;
    std::int64_t nodes;
  };
  std::vector<Pending> pending;
  for (std::int64_t lane = 0; lane < config.job_lanes; ++lane) {
    bool first = true;
    Timestamp t = span.begin;
    while (t < span.end) {
      const auto nodes = static_cast<std::int64_t>(std::llround(draw_lognormal(rng, config.job_nodes)));
      const auto seconds = std::max<std::int64_t>(
          kSecondsPerMinute, std::llround(draw_lognormal(rng, config.job_duration_hours) * kSecondsPerHour));
      if (first) {
        // Random phase so the lane is mid-job at the start of the span.
        t -= static_cast<Timestamp>(rng.uniform_index(static_cast<std::uint64_t>(seconds)));
        first = false;
      }
      pending.push_back({t, lane, static_cast<double>(seconds) / kSecondsPerHour, std::max<std::int64_t>(1, nodes)});
      t += seconds;
    }
  }
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return a.start != b.start ? a.start < b.start : a.lane < b.lane;
  });
  std::vector<JobRecord> jobs;
  jobs.reserve(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "j%07zu", i);
    jobs.push_back({id, pending[i].start, pending[i].hours, pending[i].nodes});
  }
  return jobs;
}

SynthData generate(const SynthConfig& config) {
  config.validate();
  SynthData out;
  out.span = config.span();
  const Interval span = out.span;

  // Per-node fault sites.
  std::vector<std::vector<Dimm>> dimms(static_cast<std::size_t>(config.n_nodes));
  for (std::int64_t n = 0; n < config.n_nodes; ++n) {
    Rng rng(derive_seed(config.seed, kNodeStreamBase + 2 * static_cast<std::uint64_t>(n)));
    auto& node = dimms[static_cast<std::size_t>(n)];
    node.resize(static_cast<std::size_t>(config.n_dimms_per_node));
    for (auto& d : node) {
      for (int c = 0; c < 3; ++c) d.weak_cells.push_back(random_location(rng));
    }
  }

  // Counted UEs, >= 168 h apart per node.
  Rng ue_rng(derive_seed(config.seed, kUeStream));
  std::map<std::int64_t, std::vector<Timestamp>> primaries;
  struct Primary {
    std::int64_t node;
    Timestamp time;
  };
  std::vector<Primary> placed;
  const std::int64_t max_attempts = 1000 * config.ue_count_target + 100000;
  std::int64_t attempts = 0;
  while (static_cast<std::int64_t>(placed.size()) < config.ue_count_target) {
    if (++attempts > max_attempts) {
      throw std::invalid_argument("SynthConfig: could not place ue_count_target UEs; lower the target");
    }
    const auto node = static_cast<std::int64_t>(ue_rng.uniform_index(static_cast<std::uint64_t>(config.n_nodes)));
    const Timestamp t = draw_time(ue_rng, span);
    auto& times = primaries[node];
    const bool clash = std::any_of(times.begin(), times.end(),
                                   [&](Timestamp o) { return std::llabs(o - t) < kUeBurstWindowSeconds; });
    if (clash) continue;
    times.push_back(t);
    placed.push_back({node, t});
  }

  const auto n_signalled = static_cast<std::size_t>(
      std::llround(config.signal_strength * static_cast<double>(config.ue_count_target)));
  std::vector<std::size_t> order(placed.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  ue_rng.shuffle(std::span<std::size_t>(order));
  std::vector<bool> signalled(placed.size(), false);
  for (std::size_t i = 0; i < n_signalled; ++i) signalled[order[i]] = true;

  auto& events = out.events;
  auto push_ce = [&](std::int64_t node, Timestamp t, std::int64_t count, std::int64_t dimm,
                     std::optional<Location> loc) {
    if (!span.contains(t)) return;
    LogEvent e;
    e.timestamp = t;
    e.node_id = node_name(node);
    e.kind = EventKind::ce_batch;
    e.ce_count = count;
    e.dimm_id = dimm_name(node, dimm);
    e.location = loc;
    events.push_back(std::move(e));
  };
  auto push_simple = [&](std::int64_t node, Timestamp t, EventKind kind) {
    if (!span.contains(t)) return;
    LogEvent e;
    e.timestamp = t;
    e.node_id = node_name(node);
    e.kind = kind;
    events.push_back(std::move(e));
  };

  for (std::size_t i = 0; i < placed.size(); ++i) {
    const auto [node, t] = placed[i];
    const auto dimm = static_cast<std::int64_t>(ue_rng.uniform_index(static_cast<std::uint64_t>(config.n_dimms_per_node)));
    auto make_ue = [&](Timestamp at, UeType type) {
      LogEvent e;
      e.timestamp = at;
      e.node_id = node_name(node);
      e.kind = EventKind::ue;
      e.dimm_id = dimm_name(node, dimm);
      e.ue_type = type;
      return e;
    };
    const UeType type = ue_rng.bernoulli(config.over_temperature_fraction) ? UeType::over_temperature : UeType::ecc;
    events.push_back(make_ue(t, type));
    out.planted.push_back({node_name(node), t, signalled[i]});

    const std::int64_t followers =
        config.ue_followers_mean > 0.0 ? ue_rng.geometric(1.0 / (1.0 + config.ue_followers_mean)) : 0;
    for (std::int64_t f = 0; f < followers; ++f) {
      const Timestamp ft = t + 1 + static_cast<Timestamp>(ue_rng.uniform_index(kFollowerWindow - 1));
      if (span.contains(ft)) events.push_back(make_ue(ft, UeType::ecc));
    }
    // Node returns from testing.
    push_simple(node, t + kSecondsPerDay + static_cast<Timestamp>(ue_rng.uniform_index(6 * kSecondsPerDay)),
                EventKind::node_boot);

    if (!signalled[i]) continue;
    // Escalating CE storm on the failing DIMM, densest just before the UE.
    const auto& cells = dimms[static_cast<std::size_t>(node)][static_cast<std::size_t>(dimm)].weak_cells;
    const Location anchor = cells.front();
    const std::int64_t n_events = 1 + ue_rng.poisson(config.signal_events_mean - 1.0);
    for (std::int64_t k = 0; k < n_events; ++k) {
      const double u = ue_rng.uniform();
      const auto offset = 2 * kSecondsPerMinute + static_cast<Timestamp>(u * u * (kSignalWindow - 2 * kSecondsPerMinute));
      const std::int64_t count = 1 + ue_rng.geometric(1.0 / config.signal_ce_mean);
      std::optional<Location> loc;
      if (ue_rng.bernoulli(0.8)) {
        loc = Location{anchor.rank, anchor.bank,
                       anchor.row + static_cast<std::int64_t>(ue_rng.uniform_index(64)),
                       static_cast<std::int64_t>(ue_rng.uniform_index(1024))};
      }
      push_ce(node, t - offset, count, dimm, loc);
    }
    if (ue_rng.bernoulli(config.signal_warning_probability)) {
      push_simple(node, t - 2 * kSecondsPerMinute - static_cast<Timestamp>(ue_rng.uniform_index(kSecondsPerDay)),
                  EventKind::ue_warning);
    }
  }

  // Background CEs, boots and warnings, one independent stream per node.
  const double quiet_rate = config.ce_base_rate / static_cast<double>(config.n_dimms_per_node) / kSecondsPerDay;
  const double onset_rate = config.burst_onset_rate / kSecondsPerDay;
  const double end_rate = 1.0 / (config.burst_mean_hours * kSecondsPerHour);
  for (std::int64_t n = 0; n < config.n_nodes; ++n) {
    Rng rng(derive_seed(config.seed, kNodeStreamBase + 2 * static_cast<std::uint64_t>(n) + 1));
    for (std::int64_t d = 0; d < config.n_dimms_per_node; ++d) {
      const auto& cells = dimms[static_cast<std::size_t>(n)][static_cast<std::size_t>(d)].weak_cells;
      bool burst = false;
      double t = static_cast<double>(span.begin);
      while (true) {
        const double ce_rate = burst ? quiet_rate * config.burst_intensity : quiet_rate;
        const double switch_rate = burst ? end_rate : onset_rate;
        const double total = ce_rate + switch_rate;
        if (total <= 0.0) break;
        t += rng.exponential(total);
        if (t >= static_cast<double>(span.end)) break;
        if (rng.uniform() * total < switch_rate) {
          burst = !burst;
          continue;
        }
        const std::int64_t count = 1 + rng.geometric(0.5);
        std::optional<Location> loc;
        if (rng.bernoulli(config.location_sample_fraction)) {
          loc = rng.bernoulli(0.7) ? cells[rng.uniform_index(cells.size())] : random_location(rng);
        }
        push_ce(n, static_cast<Timestamp>(t), count, d, loc);
      }
    }
    auto poisson_times = [&](double per_day, EventKind kind) {
      if (per_day <= 0.0) return;
      double t = static_cast<double>(span.begin);
      while (true) {
        t += rng.exponential(per_day / kSecondsPerDay);
        if (t >= static_cast<double>(span.end)) break;
        push_simple(n, static_cast<Timestamp>(t), kind);
      }
    };
    poisson_times(config.boot_rate, EventKind::node_boot);
    poisson_times(config.warning_rate, EventKind::ue_warning);
  }

  // Retirements away from every UE on the node, so exclusion never removes a
  // counted UE.
  Rng ret_rng(derive_seed(config.seed, kRetirementStream));
  for (std::int64_t r = 0; r < config.n_retirements; ++r) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const auto node = static_cast<std::int64_t>(ret_rng.uniform_index(static_cast<std::uint64_t>(config.n_nodes)));
      const Timestamp t = draw_time(ret_rng, span);
      const std::string name = node_name(node);
      const bool hits_ue = std::any_of(events.begin(), events.end(), [&](const LogEvent& e) {
        return e.is_ue() && e.node_id == name && e.timestamp >= t - kDefaultRetirementWindowSeconds &&
               e.timestamp <= t;
      });
      if (hits_ue) continue;
      out.retirements.push_back({name, t});
      break;
    }
  }
  std::sort(out.retirements.begin(), out.retirements.end(), [](const Retirement& a, const Retirement& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.node_id < b.node_id;
  });

  std::stable_sort(events.begin(), events.end(), [](const LogEvent& a, const LogEvent& b) {
    if (a.node_id != b.node_id) return a.node_id < b.node_id;
    return a.timestamp < b.timestamp;
  });
  std::sort(out.planted.begin(), out.planted.end(), [](const SynthData::PlantedUe& a, const SynthData::PlantedUe& b) {
    return a.node_id != b.node_id ? a.node_id < b.node_id : a.time < b.time;
  });

  Rng job_rng(derive_seed(config.seed, kJobStream));
  out.jobs = generate_jobs(config, span, job_rng);
  return out;
}

SynthLogs generate_logs(const SynthConfig& config) {
  const auto data = generate(config);
  return {format_error_log(data.events), format_job_log(data.jobs), format_retirements(data.retirements)};
}

}  // namespace uemit
