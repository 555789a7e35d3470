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

#include "uemit/eval/heatmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace uemit {

int Heatmap::cost_bin(double c) {
  if (!(c > kCostMin)) return 0;
  const double decades = std::log10(kCostMax / kCostMin);
  const int b = static_cast<int>(std::floor(kCostBins * std::log10(c / kCostMin) / decades));
  return std::clamp(b, 0, kCostBins - 1);
}

int Heatmap::probability_bin(double p) {
  return std::clamp(static_cast<int>(std::floor(p * kProbabilityBins)), 0, kProbabilityBins - 1);
}

double Heatmap::cost_bin_lower(int bin) {
  return kCostMin * std::pow(kCostMax / kCostMin, static_cast<double>(bin) / kCostBins);
}

void Heatmap::add(double potential_ue_cost, double probability, int action) {
  const auto c = static_cast<std::size_t>(cost_bin(potential_ue_cost));
  const auto p = static_cast<std::size_t>(probability_bin(probability));
  ++decisions[c][p];
  if (action == 1) ++mitigations[c][p];
}

std::optional<double> Heatmap::fraction(int c, int p) const {
  const auto n = decisions[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)];
  if (n == 0) return std::nullopt;
  return static_cast<double>(mitigations[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)]) /
         static_cast<double>(n);
}

std::string Heatmap::to_csv() const {
  auto num = [](double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  std::ostringstream out;
  out << "cost_lo,cost_hi,p_lo,p_hi,decisions,mitigations,fraction\n";
  for (int c = 0; c < kCostBins; ++c) {
    for (int p = 0; p < kProbabilityBins; ++p) {
      const auto f = fraction(c, p);
      out << num(cost_bin_lower(c)) << ',' << num(cost_bin_lower(c + 1)) << ',' << num(static_cast<double>(p) / kProbabilityBins)
          << ',' << num(static_cast<double>(p + 1) / kProbabilityBins) << ','
          << decisions[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] << ','
          << mitigations[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] << ',' << (f ? num(*f) : "") << '\n';
    }
  }
  return out.str();
}

Heatmap decision_heatmap(const PolicyFn& agent, const ProbabilityTable& probabilities, const Dataset& data,
                         const JobPool& pool, const Interval& interval, const EnvConfig& config,
                         std::uint64_t eval_seed) {
  Heatmap h;
  replay_policy(
      [&](const DecisionContext& ctx) {
        const int a = agent(ctx);
        h.add(ctx.state->potential_ue_cost, probabilities[ctx.node][ctx.event_index], a);
        return a;
      },
      data, pool, interval, config, eval_seed);
  return h;
}

}  // namespace uemit
