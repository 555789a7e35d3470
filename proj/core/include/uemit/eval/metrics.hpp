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
#include <optional>

#include "uemit/env.hpp"
#include "uemit/time.hpp"

namespace uemit {

struct ClassicalMetrics {
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;

  /// TP / (TP + FN); empty when there are no UEs.
  std::optional<double> recall() const;
  /// TP / (TP + FP); empty when nothing was mitigated.
  std::optional<double> precision() const;

  ClassicalMetrics& operator+=(const ClassicalMetrics& o);
  friend bool operator==(const ClassicalMetrics&, const ClassicalMetrics&) = default;
};

/// Classical confusion counts with a prediction window.
///
/// A UE is a true positive when some mitigation was initiated before it and
/// completes (initiation + overhead) after t_UE - window; each mitigation covers
/// at most one UE, a UE counts once however often it was mitigated, and TP is
/// the largest such matching. Other UEs are false negatives. FP = mitigations -
/// TP. Each false negative is charged to a distinct explicit "no" inside its
/// window, or else to an implicit "no"; TN = explicit and implicit "no"s - FN.
ClassicalMetrics classical_metrics(const NodeReplay& node, double overhead_seconds,
                                   std::int64_t window_seconds = kSecondsPerDay);
ClassicalMetrics classical_metrics(const ReplayResult& replay, double overhead_seconds,
                                   std::int64_t window_seconds = kSecondsPerDay);

}  // namespace uemit
