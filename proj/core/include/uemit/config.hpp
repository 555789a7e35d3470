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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uemit/eval/crossval.hpp"
#include "uemit/synthgen.hpp"

namespace uemit {

struct DataConfig {
  std::filesystem::path errors = "data/errors.csv";
  std::filesystem::path jobs = "data/jobs.csv";
  std::filesystem::path retirements = "data/retirements.csv";  // optional file
  std::optional<Timestamp> span_start;
  std::optional<Timestamp> span_end;
  bool burst_reduction = true;
  double retirement_window_hours = 168.0;
};

struct EvaluationConfig {
  std::uint64_t eval_seed = 1;
  ThresholdMode threshold_mode = ThresholdMode::test;
  std::vector<double> mitigation_costs_minutes = {2.0, 5.0, 10.0};
  std::vector<double> sensitivity_factors = {0.1, 0.3, 1.0, 3.0, 10.0};
};

/// Everything a run needs; loaded from YAML, with command-line overrides
/// applied by the caller.
struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "runs/default";
  DataConfig data;
  EnvConfig env;
  long episodes = 20000;
  SearchConfig search;
  ForestParams forest;
  EvaluationConfig evaluation;
  SynthConfig synth;

  void validate() const;
  /// Cross-validation settings with seeds derived from `seed`.
  CrossvalConfig crossval() const;
};

/// Keys absent from the document keep their defaults; unknown keys are errors.
RunConfig run_config_from_yaml(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical YAML of every setting, used for manifests and hashing.
std::string run_config_to_yaml(const RunConfig& config);
/// FNV-1a of the canonical YAML as 16 hex digits.
std::string config_hash(const RunConfig& config);

struct LoadedData {
  Dataset dataset;
  JobPool pool;
  std::size_t raw_events = 0;
  std::size_t ues_after_reduction = 0;
};

/// Ingests the logs named by `data`, applies retirement exclusion, burst
/// reduction and per-minute merging. The span comes from the config, else from
/// a manifest.json next to the error log, else from the first and last event.
LoadedData load_data(const DataConfig& data);

}  // namespace uemit
