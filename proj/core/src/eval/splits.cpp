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

#include "uemit/eval/splits.hpp"

#include <stdexcept>

namespace uemit {

SplitPlan build_splits(const Interval& span) {
  const Timestamp total = span.duration();
  if (total / kNumParts <= kFirstSplitTrainSeconds)
    throw std::invalid_argument("build_splits: log span too short; each of the 6 parts must exceed 14 days");
  SplitPlan plan;
  plan.span = span;
  for (int k = 0; k < kNumParts; ++k) {
    const Timestamp begin = span.begin + total * k / kNumParts;
    const Timestamp end = k + 1 == kNumParts ? span.end : span.begin + total * (k + 1) / kNumParts;
    plan.parts.push_back({begin, end});
  }
  {
    const Interval first{span.begin, span.begin + kFirstSplitTrainSeconds};
    plan.splits.push_back({1, first, first, {first.end, plan.parts[0].end}});
  }
  for (int k = 2; k <= kNumParts; ++k) {
    const Timestamp before_end = plan.parts[static_cast<std::size_t>(k - 1)].begin;
    const Timestamp cut = span.begin + (before_end - span.begin) * 3 / 4;
    plan.splits.push_back({k, {span.begin, cut}, {cut, before_end}, plan.parts[static_cast<std::size_t>(k - 1)]});
  }
  return plan;
}

}  // namespace uemit
