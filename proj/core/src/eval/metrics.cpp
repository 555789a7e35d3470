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

#include "uemit/eval/metrics.hpp"

#include <algorithm>
#include <vector>

namespace uemit {

std::optional<double> ClassicalMetrics::recall() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::optional<double> ClassicalMetrics::precision() const {
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

ClassicalMetrics& ClassicalMetrics::operator+=(const ClassicalMetrics& o) {
  tp += o.tp;
  fn += o.fn;
  fp += o.fp;
  tn += o.tn;
  return *this;
}

ClassicalMetrics classical_metrics(const NodeReplay& node, double overhead_seconds, std::int64_t window_seconds) {
  ClassicalMetrics m;
  std::vector<Timestamp> mitigations, refusals;
  for (const auto& d : node.decisions) (d.action == 1 ? mitigations : refusals).push_back(d.time);
  std::sort(mitigations.begin(), mitigations.end());
  std::sort(refusals.begin(), refusals.end());
  std::vector<bool> used(mitigations.size(), false), refusal_used(refusals.size(), false);
  std::vector<Timestamp> ues = node.ue_times;
  std::sort(ues.begin(), ues.end());

  std::int64_t implicit_no = 0;
  for (const Timestamp ue : ues) {
    const double earliest = static_cast<double>(ue - window_seconds) - overhead_seconds;
    // Earliest unused qualifying mitigation: it expires first, so this maximizes matches.
    bool hit = false;
    for (std::size_t k = 0; k < mitigations.size() && mitigations[k] < ue; ++k) {
      if (used[k] || static_cast<double>(mitigations[k]) <= earliest) continue;
      used[k] = true;
      hit = true;
      break;
    }
    if (hit) {
      ++m.tp;
      continue;
    }
    ++m.fn;
    // The missed UE is charged to an unused "no" in its window, else to an implicit one.
    bool explained = false;
    for (std::size_t k = 0; k < refusals.size() && refusals[k] < ue; ++k) {
      if (refusal_used[k] || refusals[k] <= ue - window_seconds) continue;
      refusal_used[k] = true;
      explained = true;
      break;
    }
    if (!explained) ++implicit_no;
  }
  m.fp = static_cast<std::int64_t>(mitigations.size()) - m.tp;
  m.tn = static_cast<std::int64_t>(refusals.size()) + implicit_no - m.fn;
  return m;
}

ClassicalMetrics classical_metrics(const ReplayResult& replay, double overhead_seconds, std::int64_t window_seconds) {
  ClassicalMetrics total;
  for (const auto& n : replay.nodes) total += classical_metrics(n, overhead_seconds, window_seconds);
  return total;
}

}  // namespace uemit
