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

#include <vector>

#include "uemit/time.hpp"

namespace uemit {

inline constexpr int kNumParts = 6;
inline constexpr Timestamp kFirstSplitTrainSeconds = 14 * kSecondsPerDay;

struct Split {
  int index = 0;  // 1-based
  Interval train;
  Interval validation;
  Interval test;
};

struct SplitPlan {
  Interval span;
  std::vector<Interval> parts;
  std::vector<Split> splits;
};

/// Time-series nested cross-validation over six equal parts. Split 1 trains and
/// validates on the first 14 days and tests on the rest of part 1. Split k > 1
/// tests on part k and divides everything before it 75% / 25% into training and
/// validation. Part boundaries are floor(k * span / 6); the last part absorbs
/// rounding. Throws std::invalid_argument when part 1 is not longer than 14 days.
SplitPlan build_splits(const Interval& span);

}  // namespace uemit
