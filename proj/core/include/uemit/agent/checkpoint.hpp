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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "uemit/agent/dqn.hpp"

namespace uemit {

/// JSON checkpoint layout:
///   {"format": "uemit-agent", "version": 1,
///    "hyperparameters": {...}, "input_dim": 15, "hidden": [...],
///    "parameters": [...], "normalizer": {"mean": [...], "scale": [...]},
///    "config": <caller supplied>}
/// Doubles are written in shortest round-trip form, so a save/load cycle is bit exact.
nlohmann::json hyperparameters_to_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const nlohmann::json& j);

nlohmann::json agent_to_json(const AgentModel& model, const nlohmann::json& config = nlohmann::json::object());
AgentModel agent_from_json(const nlohmann::json& j);

void save_agent(const std::filesystem::path& path, const AgentModel& model,
                const nlohmann::json& config = nlohmann::json::object());
AgentModel load_agent(const std::filesystem::path& path);

}  // namespace uemit
