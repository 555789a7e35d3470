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
#include <string_view>

namespace uemit {

/// UTC seconds since the Unix epoch.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kSecondsPerMinute = 60;
inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

/// Mean Gregorian month, 365.2425 / 12 days.
inline constexpr double kSecondsPerMonth = 365.2425 / 12.0 * 86400.0;

inline constexpr double to_hours(std::int64_t seconds) {
  return static_cast<double>(seconds) / static_cast<double>(kSecondsPerHour);
}

/// Half-open time interval [begin, end).
struct Interval {
  Timestamp begin = 0;
  Timestamp end = 0;

  constexpr bool contains(Timestamp t) const { return t >= begin && t < end; }
  constexpr std::int64_t duration() const { return end - begin; }
  constexpr bool empty() const { return end <= begin; }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

/// Parses "YYYY-MM-DDTHH:MM:SSZ". Throws std::invalid_argument on anything else.
Timestamp parse_iso8601(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

}  // namespace uemit
