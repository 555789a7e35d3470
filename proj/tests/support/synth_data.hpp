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

#include "uemit/env.hpp"
#include "uemit/features.hpp"
#include "uemit/synthgen.hpp"

namespace uemit::test {

struct SynthDataset {
  Dataset dataset;
  JobPool pool;
  SynthData raw;
};

/// Generated logs run through the default timeline pipeline.
inline SynthDataset synth_dataset(const SynthConfig& config) {
  auto raw = generate(config);
  auto timelines = build_timelines(raw.events, raw.retirements, TimelineOptions{});
  Dataset data(std::move(timelines), raw.span);
  JobPool pool(raw.jobs);
  return {std::move(data), std::move(pool), std::move(raw)};
}

/// Small, quickly generated configuration with modest jobs.
inline SynthConfig small_synth(std::uint64_t seed = 1) {
  SynthConfig c;
  c.n_nodes = 12;
  c.span_months = 3.0;
  c.ce_base_rate = 1.0;
  c.ue_count_target = 20;
  c.job_nodes = {2.0, 1.0, 1.0, 32.0};
  c.job_duration_hours = {3.0, 1.0, 0.05, 48.0};
  c.seed = seed;
  return c;
}

}  // namespace uemit::test
