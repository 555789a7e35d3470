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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "uemit/time.hpp"

namespace uemit {

enum class EventKind { ce_batch, ue, ue_warning, node_boot };
enum class UeType { ecc, over_temperature };

std::string_view to_string(EventKind kind);
std::string_view to_string(UeType type);

/// Physical DRAM coordinates of a corrected error (subset of CEs only).
struct Location {
  std::int64_t rank = 0;
  std::int64_t bank = 0;
  std::int64_t row = 0;
  std::int64_t column = 0;
  friend auto operator<=>(const Location&, const Location&) = default;
};

/// One timestamped node-level record from errors.csv.
struct LogEvent {
  Timestamp timestamp = 0;
  std::string node_id;
  EventKind kind = EventKind::ce_batch;
  std::int64_t ce_count = 0;  // > 0 iff kind == ce_batch
  std::optional<std::string> dimm_id;
  std::optional<Location> location;
  std::optional<UeType> ue_type;  // present iff kind == ue

  bool is_ue() const { return kind == EventKind::ue; }
  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

struct JobRecord {
  std::string job_id;
  Timestamp start_time = 0;
  double duration_hours = 0.0;
  std::int64_t num_nodes = 1;
  friend bool operator==(const JobRecord&, const JobRecord&) = default;
};

struct Retirement {
  std::string node_id;
  Timestamp timestamp = 0;
  friend bool operator==(const Retirement&, const Retirement&) = default;
};

/// Raised for malformed input. `line()` is the 1-based line in the file; the
/// header is line 1.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kErrorLogHeader =
    "timestamp,node_id,kind,ce_count,dimm_id,rank,bank,row,column,ue_type";
inline constexpr std::string_view kJobLogHeader = "job_id,start_time,duration_hours,num_nodes";
inline constexpr std::string_view kRetirementHeader = "node_id,timestamp";

// Ingestion. The parse_* overloads read from a stream; ingest_* open a file
// and throw std::runtime_error on I/O failure. Error events come back sorted by
// (node_id, timestamp) with ties kept in file order.
std::vector<LogEvent> parse_error_log(std::istream& in);
std::vector<LogEvent> ingest_error_log(const std::filesystem::path& path);
std::vector<JobRecord> parse_job_log(std::istream& in);
std::vector<JobRecord> ingest_job_log(const std::filesystem::path& path);
std::vector<Retirement> parse_retirements(std::istream& in);
std::vector<Retirement> ingest_retirements(const std::filesystem::path& path);

std::string format_error_log(std::span<const LogEvent> events);
std::string format_job_log(std::span<const JobRecord> jobs);
std::string format_retirements(std::span<const Retirement> retirements);

/// CE location qualified by its DIMM; the unit for the distinct-location counts.
struct CeSite {
  std::string dimm_id;  // empty when the CE had no DIMM id
  Location location;
  friend auto operator<=>(const CeSite&, const CeSite&) = default;
};

/// All events of one node within one merge window, collapsed.
struct MergedEvent {
  Timestamp timestamp = 0;  // time of the first event in the window
  std::int64_t ce_count = 0;
  std::int64_t ue_warnings = 0;
  std::int64_t boots = 0;
  bool ue = false;
  std::optional<UeType> ue_type;  // type of the first UE in the window
  std::vector<std::string> ce_dimms;  // sorted, unique
  std::vector<CeSite> ce_sites;       // sorted, unique
  friend bool operator==(const MergedEvent&, const MergedEvent&) = default;
};

struct NodeTimeline {
  std::string node_id;
  std::vector<MergedEvent> events;  // strictly increasing timestamps, >= 60 s apart
  friend bool operator==(const NodeTimeline&, const NodeTimeline&) = default;

  /// Index range [first, last) of events inside `interval`.
  std::pair<std::size_t, std::size_t> range(const Interval& interval) const;
};

inline constexpr std::int64_t kMergeWindowSeconds = kSecondsPerMinute;
inline constexpr std::int64_t kUeBurstWindowSeconds = 168 * kSecondsPerHour;
inline constexpr std::int64_t kDefaultRetirementWindowSeconds = 168 * kSecondsPerHour;

/// Collapses one node's events into minute windows. A window opens at the first
/// event not yet merged and takes every event strictly less than 60 s later.
/// Precondition: events belong to one node and are sorted by time.
NodeTimeline merge_per_minute(std::span<const LogEvent> events);

/// Applies the same window rule to an already merged timeline (idempotent on
/// merge output).
NodeTimeline merge_per_minute(const NodeTimeline& timeline);

/// Keeps a UE iff no retained UE on the same node lies within the preceding
/// 168 h. Non-UE events pass through. Input sorted by (node, time); any number
/// of nodes.
std::vector<LogEvent> reduce_ue_bursts(std::span<const LogEvent> events,
                                       std::int64_t window_seconds = kUeBurstWindowSeconds);

/// Drops every event of a retired node that falls in [retirement - window,
/// retirement]. Overlapping windows on a node exclude their union.
std::vector<LogEvent> exclude_retirement_windows(
    std::span<const LogEvent> events, std::span<const Retirement> retirements,
    std::int64_t window_seconds = kDefaultRetirementWindowSeconds);

struct TimelineOptions {
  bool reduce_bursts = true;
  std::int64_t burst_window_seconds = kUeBurstWindowSeconds;
  std::int64_t retirement_window_seconds = kDefaultRetirementWindowSeconds;
};

/// exclude_retirement_windows -> reduce_ue_bursts -> per-node merge_per_minute.
/// Result is ordered by node_id.
std::vector<NodeTimeline> build_timelines(std::span<const LogEvent> events,
                                          std::span<const Retirement> retirements,
                                          const TimelineOptions& options = {});

}  // namespace uemit
