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

#include "uemit/logs.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace uemit {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ce_batch: return "ce_batch";
    case EventKind::ue: return "ue";
    case EventKind::ue_warning: return "ue_warning";
    case EventKind::node_boot: return "node_boot";
  }
  return "?";
}

std::string_view to_string(UeType type) {
  return type == UeType::ecc ? "ecc" : "over_temperature";
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

template <typename Fn>
void for_each_row(std::istream& in, std::string_view header, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!saw_header) {
      if (line != header) {
        throw SchemaError(line_no, "expected header '" + std::string(header) + "'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    fn(line_no, fields);
  }
  if (!saw_header) throw SchemaError(1, "missing header");
}

std::int64_t parse_int(std::size_t line, std::string_view field, std::string_view name) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SchemaError(line, "column " + std::string(name) + ": not an integer '" + std::string(field) + "'");
  }
  return value;
}

std::int64_t parse_non_negative(std::size_t line, std::string_view field, std::string_view name) {
  const auto value = parse_int(line, field, name);
  if (value < 0) throw SchemaError(line, "column " + std::string(name) + ": negative value");
  return value;
}

double parse_double(std::size_t line, std::string_view field, std::string_view name) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw SchemaError(line, "column " + std::string(name) + ": not a number '" + std::string(field) + "'");
  }
  return value;
}

Timestamp parse_time(std::size_t line, std::string_view field) {
  try {
    return parse_iso8601(field);
  } catch (const std::invalid_argument&) {
    throw SchemaError(line, "bad timestamp '" + std::string(field) + "'");
  }
}

void check_id(std::size_t line, std::string_view field, std::string_view name) {
  if (field.empty()) throw SchemaError(line, "column " + std::string(name) + ": empty");
}

void check_columns(std::size_t line, const std::vector<std::string_view>& fields, std::size_t n) {
  if (fields.size() != n) {
    throw SchemaError(line, "expected " + std::to_string(n) + " columns, got " + std::to_string(fields.size()));
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<LogEvent> parse_error_log(std::istream& in) {
  std::vector<LogEvent> events;
  for_each_row(in, kErrorLogHeader, [&](std::size_t line, const std::vector<std::string_view>& f) {
    check_columns(line, f, 10);
    LogEvent e;
    e.timestamp = parse_time(line, f[0]);
    check_id(line, f[1], "node_id");
    e.node_id = std::string(f[1]);
    if (f[2] == "ce_batch") e.kind = EventKind::ce_batch;
    else if (f[2] == "ue") e.kind = EventKind::ue;
    else if (f[2] == "ue_warning") e.kind = EventKind::ue_warning;
    else if (f[2] == "node_boot") e.kind = EventKind::node_boot;
    else throw SchemaError(line, "unknown kind '" + std::string(f[2]) + "'");

    const std::int64_t count = f[3].empty() ? 0 : parse_non_negative(line, f[3], "ce_count");
    if (e.kind == EventKind::ce_batch && count == 0) throw SchemaError(line, "ce_batch with ce_count 0");
    if (e.kind != EventKind::ce_batch && count != 0) throw SchemaError(line, "ce_count on non-CE event");
    e.ce_count = count;

    if (!f[4].empty()) e.dimm_id = std::string(f[4]);
    const bool any_loc = !f[5].empty() || !f[6].empty() || !f[7].empty() || !f[8].empty();
    if (any_loc) {
      Location loc;
      loc.rank = parse_non_negative(line, f[5], "rank");
      loc.bank = parse_non_negative(line, f[6], "bank");
      loc.row = parse_non_negative(line, f[7], "row");
      loc.column = parse_non_negative(line, f[8], "column");
      e.location = loc;
    }
    if (e.kind == EventKind::ue) {
      if (f[9] == "ecc") e.ue_type = UeType::ecc;
      else if (f[9] == "over_temperature") e.ue_type = UeType::over_temperature;
      else throw SchemaError(line, "ue row needs ue_type ecc|over_temperature");
    } else if (!f[9].empty()) {
      throw SchemaError(line, "ue_type on non-UE event");
    }
    events.push_back(std::move(e));
  });
  std::stable_sort(events.begin(), events.end(), [](const LogEvent& a, const LogEvent& b) {
    if (a.node_id != b.node_id) return a.node_id < b.node_id;
    return a.timestamp < b.timestamp;
  });
  return events;
}

std::vector<LogEvent> ingest_error_log(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_error_log(in);
}

std::vector<JobRecord> parse_job_log(std::istream& in) {
  std::vector<JobRecord> jobs;
  for_each_row(in, kJobLogHeader, [&](std::size_t line, const std::vector<std::string_view>& f) {
    check_columns(line, f, 4);
    JobRecord j;
    check_id(line, f[0], "job_id");
    j.job_id = std::string(f[0]);
    j.start_time = parse_time(line, f[1]);
    j.duration_hours = parse_double(line, f[2], "duration_hours");
    if (!(j.duration_hours > 0.0)) throw SchemaError(line, "duration_hours must be > 0");
    j.num_nodes = parse_int(line, f[3], "num_nodes");
    if (j.num_nodes < 1) throw SchemaError(line, "num_nodes must be >= 1");
    jobs.push_back(std::move(j));
  });
  return jobs;
}

std::vector<JobRecord> ingest_job_log(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_job_log(in);
}

std::vector<Retirement> parse_retirements(std::istream& in) {
  std::vector<Retirement> out;
  for_each_row(in, kRetirementHeader, [&](std::size_t line, const std::vector<std::string_view>& f) {
    check_columns(line, f, 2);
    check_id(line, f[0], "node_id");
    out.push_back({std::string(f[0]), parse_time(line, f[1])});
  });
  return out;
}

std::vector<Retirement> ingest_retirements(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_retirements(in);
}

std::string format_error_log(std::span<const LogEvent> events) {
  std::string out(kErrorLogHeader);
  out += '\n';
  for (const auto& e : events) {
    out += format_iso8601(e.timestamp);
    out += ',';
    out += e.node_id;
    out += ',';
    out += to_string(e.kind);
    out += ',';
    out += std::to_string(e.ce_count);
    out += ',';
    if (e.dimm_id) out += *e.dimm_id;
    if (e.location) {
      out += ',' + std::to_string(e.location->rank) + ',' + std::to_string(e.location->bank) + ',' +
             std::to_string(e.location->row) + ',' + std::to_string(e.location->column) + ',';
    } else {
      out += ",,,,,";
    }
    if (e.ue_type) out += to_string(*e.ue_type);
    out += '\n';
  }
  return out;
}

std::string format_job_log(std::span<const JobRecord> jobs) {
  std::string out(kJobLogHeader);
  out += '\n';
  for (const auto& j : jobs) {
    out += j.job_id + ',' + format_iso8601(j.start_time) + ',' + format_double(j.duration_hours) + ',' +
           std::to_string(j.num_nodes) + '\n';
  }
  return out;
}

std::string format_retirements(std::span<const Retirement> retirements) {
  std::string out(kRetirementHeader);
  out += '\n';
  for (const auto& r : retirements) out += r.node_id + ',' + format_iso8601(r.timestamp) + '\n';
  return out;
}

std::pair<std::size_t, std::size_t> NodeTimeline::range(const Interval& interval) const {
  const auto by_time = [](const MergedEvent& e, Timestamp t) { return e.timestamp < t; };
  const auto first = std::lower_bound(events.begin(), events.end(), interval.begin, by_time);
  const auto last = std::lower_bound(first, events.end(), interval.end, by_time);
  return {static_cast<std::size_t>(first - events.begin()), static_cast<std::size_t>(last - events.begin())};
}

namespace {

MergedEvent to_merged(const LogEvent& e) {
  MergedEvent m;
  m.timestamp = e.timestamp;
  switch (e.kind) {
    case EventKind::ce_batch:
      m.ce_count = e.ce_count;
      if (e.dimm_id) m.ce_dimms.push_back(*e.dimm_id);
      if (e.location) m.ce_sites.push_back({e.dimm_id.value_or(""), *e.location});
      break;
    case EventKind::ue:
      m.ue = true;
      m.ue_type = e.ue_type;
      break;
    case EventKind::ue_warning: m.ue_warnings = 1; break;
    case EventKind::node_boot: m.boots = 1; break;
  }
  return m;
}

template <typename T>
void sorted_union(std::vector<T>& into, const std::vector<T>& from) {
  std::vector<T> merged;
  merged.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(merged));
  into = std::move(merged);
}

void absorb(MergedEvent& window, const MergedEvent& e) {
  window.ce_count += e.ce_count;
  window.ue_warnings += e.ue_warnings;
  window.boots += e.boots;
  if (e.ue && !window.ue) {
    window.ue = true;
    window.ue_type = e.ue_type;
  }
  sorted_union(window.ce_dimms, e.ce_dimms);
  sorted_union(window.ce_sites, e.ce_sites);
}

std::vector<MergedEvent> merge_windows(std::vector<MergedEvent> items) {
  std::vector<MergedEvent> out;
  for (auto& e : items) {
    if (!out.empty() && e.timestamp < out.back().timestamp + kMergeWindowSeconds) {
      absorb(out.back(), e);
    } else {
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace

NodeTimeline merge_per_minute(std::span<const LogEvent> events) {
  NodeTimeline t;
  if (!events.empty()) t.node_id = events.front().node_id;
  std::vector<MergedEvent> items;
  items.reserve(events.size());
  for (const auto& e : events) items.push_back(to_merged(e));
  t.events = merge_windows(std::move(items));
  return t;
}

NodeTimeline merge_per_minute(const NodeTimeline& timeline) {
  return {timeline.node_id, merge_windows(timeline.events)};
}

std::vector<LogEvent> reduce_ue_bursts(std::span<const LogEvent> events, std::int64_t window_seconds) {
  std::vector<LogEvent> out;
  out.reserve(events.size());
  std::map<std::string, Timestamp, std::less<>> last_kept;
  for (const auto& e : events) {
    if (e.is_ue()) {
      const auto it = last_kept.find(e.node_id);
      if (it != last_kept.end() && e.timestamp - it->second < window_seconds) continue;
      last_kept[e.node_id] = e.timestamp;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<LogEvent> exclude_retirement_windows(std::span<const LogEvent> events,
                                                 std::span<const Retirement> retirements,
                                                 std::int64_t window_seconds) {
  if (retirements.empty()) return {events.begin(), events.end()};
  std::map<std::string, std::vector<Timestamp>, std::less<>> by_node;
  for (const auto& r : retirements) by_node[r.node_id].push_back(r.timestamp);
  for (auto& [node, times] : by_node) std::sort(times.begin(), times.end());

  std::vector<LogEvent> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    const auto it = by_node.find(e.node_id);
    if (it != by_node.end()) {
      // First retirement at or after the event; it has the window most likely
      // to contain the event, since all windows have equal length.
      const auto& times = it->second;
      const auto r = std::lower_bound(times.begin(), times.end(), e.timestamp);
      if (r != times.end() && e.timestamp >= *r - window_seconds) continue;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<NodeTimeline> build_timelines(std::span<const LogEvent> events,
                                          std::span<const Retirement> retirements,
                                          const TimelineOptions& options) {
  std::vector<LogEvent> sorted(events.begin(), events.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const LogEvent& a, const LogEvent& b) {
    if (a.node_id != b.node_id) return a.node_id < b.node_id;
    return a.timestamp < b.timestamp;
  });
  auto kept = exclude_retirement_windows(sorted, retirements, options.retirement_window_seconds);
  if (options.reduce_bursts) kept = reduce_ue_bursts(kept, options.burst_window_seconds);

  std::vector<NodeTimeline> timelines;
  std::size_t begin = 0;
  while (begin < kept.size()) {
    std::size_t end = begin;
    while (end < kept.size() && kept[end].node_id == kept[begin].node_id) ++end;
    timelines.push_back(merge_per_minute(std::span<const LogEvent>(kept).subspan(begin, end - begin)));
    begin = end;
  }
  return timelines;
}

}  // namespace uemit
