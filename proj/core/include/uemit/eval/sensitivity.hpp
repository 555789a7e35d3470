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

#include <string>
#include <vector>

#include "uemit/eval/crossval.hpp"

namespace uemit {

struct SensitivityPoint {
  double factor = 1.0;
  CostReport report;
};

/// Reruns cross-validation with every job's node count multiplied by each
/// factor (durations unchanged). Learned policies are retrained per factor.
std::vector<SensitivityPoint> job_scale_sensitivity(const Dataset& data, const JobPool& pool,
                                                    const CrossvalConfig& config, const std::vector<double>& factors);

/// factor,policy,ue_cost,mitigation_cost,total
std::string sensitivity_csv(const std::vector<SensitivityPoint>& points);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_r_squared(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace uemit
