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

#include "uemit/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace uemit {
namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') throw std::invalid_argument("bad timestamp: " + std::string(text));
  }
  std::from_chars(first, last, value);
  return value;
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  // 2014-10-01T00:00:00Z
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z') {
    throw std::invalid_argument("bad timestamp: " + std::string(text));
  }
  const int year = parse_field(text, 0, 4);
  const int month = parse_field(text, 5, 2);
  const int day = parse_field(text, 8, 2);
  const int hour = parse_field(text, 11, 2);
  const int minute = parse_field(text, 14, 2);
  const int second = parse_field(text, 17, 2);

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
    throw std::invalid_argument("bad timestamp: " + std::string(text));
  }
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days_since_epoch) * kSecondsPerDay + hour * kSecondsPerHour +
         minute * kSecondsPerMinute + second;
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  std::int64_t days = t / kSecondsPerDay;
  std::int64_t rem = t % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / kSecondsPerHour),
                static_cast<int>((rem % kSecondsPerHour) / kSecondsPerMinute),
                static_cast<int>(rem % kSecondsPerMinute));
  return buf;
}

}  // namespace uemit
