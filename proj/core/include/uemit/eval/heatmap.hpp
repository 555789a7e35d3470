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

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "uemit/env.hpp"
#include "uemit/policies/policies.hpp"

namespace uemit {

/// Mitigation fractions over potential UE cost (log bins) x forest probability
/// (linear bins).
struct Heatmap {
  static constexpr int kCostBins = 10;
  static constexpr int kProbabilityBins = 10;
  static constexpr double kCostMin = 1e-2;  // node-hours
  static constexpr double kCostMax = 1e5;

  std::array<std::array<std::int64_t, kProbabilityBins>, kCostBins> decisions{};
  std::array<std::array<std::int64_t, kProbabilityBins>, kCostBins> mitigations{};

  /// Costs outside [kCostMin, kCostMax) fall into the edge bins.
  static int cost_bin(double potential_ue_cost);
  static int probability_bin(double p);
  static double cost_bin_lower(int bin);

  void add(double potential_ue_cost, double probability, int action);
  /// Empty for bins without decisions.
  std::optional<double> fraction(int cost_bin, int probability_bin) const;

  /// cost_lo,cost_hi,p_lo,p_hi,decisions,mitigations,fraction (blank when no data).
  std::string to_csv() const;
};

/// Replays `agent` over `interval` and bins every decision.
Heatmap decision_heatmap(const PolicyFn& agent, const ProbabilityTable& probabilities, const Dataset& data,
                         const JobPool& pool, const Interval& interval, const EnvConfig& config,
                         std::uint64_t eval_seed);

}  // namespace uemit
