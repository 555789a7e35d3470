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

#include "uemit/agent/checkpoint.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace uemit {

nlohmann::json hyperparameters_to_json(const Hyperparameters& hp) {
  return {
      {"learning_rate", hp.learning_rate},
      {"gamma", hp.gamma},
      {"batch_size", hp.batch_size},
      {"train_frequency", hp.train_frequency},
      {"target_sync_frequency", hp.target_sync_frequency},
      {"alpha", hp.alpha},
      {"beta_start", hp.beta_start},
      {"beta_end", hp.beta_end},
      {"epsilon_start", hp.epsilon_start},
      {"epsilon_end", hp.epsilon_end},
      {"epsilon_decay_steps", hp.epsilon_decay_steps},
      {"buffer_capacity", hp.buffer_capacity},
      {"priority_epsilon", hp.priority_epsilon},
      {"learning_starts", hp.learning_starts},
      {"reward_scale", hp.reward_scale},
      {"max_grad_norm", hp.max_grad_norm},
      {"hidden", hp.hidden},
  };
}

Hyperparameters hyperparameters_from_json(const nlohmann::json& j) {
  Hyperparameters hp;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("learning_rate", hp.learning_rate);
  get("gamma", hp.gamma);
  get("batch_size", hp.batch_size);
  get("train_frequency", hp.train_frequency);
  get("target_sync_frequency", hp.target_sync_frequency);
  get("alpha", hp.alpha);
  get("beta_start", hp.beta_start);
  get("beta_end", hp.beta_end);
  get("epsilon_start", hp.epsilon_start);
  get("epsilon_end", hp.epsilon_end);
  get("epsilon_decay_steps", hp.epsilon_decay_steps);
  get("buffer_capacity", hp.buffer_capacity);
  get("priority_epsilon", hp.priority_epsilon);
  get("learning_starts", hp.learning_starts);
  get("reward_scale", hp.reward_scale);
  get("max_grad_norm", hp.max_grad_norm);
  get("hidden", hp.hidden);
  hp.validate();
  return hp;
}

nlohmann::json agent_to_json(const AgentModel& model, const nlohmann::json& config) {
  const auto& p = model.net.parameters();
  return {
      {"format", "uemit-agent"},
      {"version", 1},
      {"hyperparameters", hyperparameters_to_json(model.hp)},
      {"input_dim", model.net.input_dim()},
      {"hidden", model.net.hidden()},
      {"parameters", std::vector<double>(p.data(), p.data() + p.size())},
      {"normalizer", {{"mean", model.normalizer.mean()}, {"scale", model.normalizer.scale()}}},
      {"config", config},
  };
}

AgentModel agent_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "uemit-agent") throw std::runtime_error("not a uemit agent checkpoint");
  if (j.at("version").get<int>() != 1) throw std::runtime_error("unsupported checkpoint version");
  AgentModel m;
  m.hp = hyperparameters_from_json(j.at("hyperparameters"));
  m.net = QNetwork(j.at("input_dim").get<int>(), j.at("hidden").get<std::vector<int>>());
  const auto params = j.at("parameters").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(params.size()) != m.net.num_parameters())
    throw std::runtime_error("checkpoint parameter count does not match architecture");
  m.net.parameters() = Eigen::Map<const Eigen::VectorXd>(params.data(), m.net.num_parameters());
  m.normalizer.set(j.at("normalizer").at("mean").get<std::array<double, kFeatureCount>>(),
                   j.at("normalizer").at("scale").get<std::array<double, kFeatureCount>>());
  return m;
}

void save_agent(const std::filesystem::path& path, const AgentModel& model, const nlohmann::json& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << agent_to_json(model, config).dump() << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

AgentModel load_agent(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return agent_from_json(nlohmann::json::parse(in));
}

}  // namespace uemit
