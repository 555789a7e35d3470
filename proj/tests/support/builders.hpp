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

#include <optional>
#include <string>
#include <vector>

#include "uemit/env.hpp"
#include "uemit/logs.hpp"
#include "uemit/rng.hpp"

namespace uemit::test {

inline LogEvent ce(Timestamp t, const std::string& node, std::int64_t count = 1, std::string dimm = "d0",
                   std::optional<Location> loc = std::nullopt) {
  LogEvent e;
  e.timestamp = t;
  e.node_id = node;
  e.kind = EventKind::ce_batch;
  e.ce_count = count;
  e.dimm_id = std::move(dimm);
  e.location = loc;
  return e;
}

inline LogEvent ue(Timestamp t, const std::string& node, UeType type = UeType::ecc) {
  LogEvent e;
  e.timestamp = t;
  e.node_id = node;
  e.kind = EventKind::ue;
  e.ue_type = type;
  return e;
}

inline LogEvent boot(Timestamp t, const std::string& node) {
  LogEvent e;
  e.timestamp = t;
  e.node_id = node;
  e.kind = EventKind::node_boot;
  return e;
}

inline LogEvent warning(Timestamp t, const std::string& node) {
  LogEvent e;
  e.timestamp = t;
  e.node_id = node;
  e.kind = EventKind::ue_warning;
  return e;
}

/// Merged timeline from (time, is_ue) pairs, one event per entry.
inline NodeTimeline timeline(const std::string& node, const std::vector<std::pair<Timestamp, bool>>& events) {
  std::vector<LogEvent> raw;
  for (const auto& [t, is_ue] : events) raw.push_back(is_ue ? ue(t, node) : ce(t, node));
  return merge_per_minute(raw);
}

/// Job pool with one job shape, so every sampled job is identical.
inline JobPool single_job_pool(double hours, std::int64_t nodes) {
  return JobPool({JobRecord{"j0", 0, hours, nodes}});
}

}  // namespace uemit::test
