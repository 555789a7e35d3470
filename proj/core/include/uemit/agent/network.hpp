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
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uemit/rng.hpp"

namespace uemit {

inline constexpr int kNumActions = 2;

/// Dueling Q-network: a ReLU trunk followed by a scalar value head and a
/// two-way advantage head, combined as Q = V + A - mean(A).
///
/// All weights and biases live in one flat vector. Layer l stores its weight
/// matrix (out x in, column-major) followed by its bias. Layers are the trunk
/// layers in order, then the value head, then the advantage head.
class QNetwork {
 public:
  static std::vector<int> default_hidden() { return {256, 256, 128, 64}; }

  explicit QNetwork(int input_dim, std::vector<int> hidden = default_hidden());

  /// Fan-in scaled uniform initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  void initialize(Rng& rng);

  /// Q values for one state.
  std::array<double, kNumActions> forward(std::span<const double> state) const;
  /// Q values for a batch; `states` is input_dim x B, the result 2 x B.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& states) const;
  /// Value head output for one state.
  double value(std::span<const double> state) const;

  /// Weighted Huber loss (delta 1) of Q(s_i, a_i) against y_i, averaged over
  /// the batch, and its gradient with respect to parameters(). TD errors
  /// Q(s_i, a_i) - y_i are written to `td_errors` when given.
  double loss_and_gradient(const Eigen::MatrixXd& states, std::span<const int> actions,
                           std::span<const double> targets, std::span<const double> weights,
                           Eigen::VectorXd& gradient, std::vector<double>* td_errors = nullptr) const;

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }
  Eigen::Index num_parameters() const { return params_.size(); }

  int input_dim() const { return input_dim_; }
  const std::vector<int>& hidden() const { return hidden_; }
  std::size_t num_layers() const { return layers_.size(); }

  Eigen::Map<Eigen::MatrixXd> weight(std::size_t layer);
  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;

  std::size_t value_layer() const { return hidden_.size(); }
  std::size_t advantage_layer() const { return hidden_.size() + 1; }

 private:
  struct Layer {
    int in = 0;
    int out = 0;
    Eigen::Index offset = 0;  // of the weight block; the bias follows
  };

  // Trunk activations for a batch; acts[0] is the input.
  std::vector<Eigen::MatrixXd> trunk(const Eigen::MatrixXd& states) const;

  int input_dim_;
  std::vector<int> hidden_;
  std::vector<Layer> layers_;
  Eigen::VectorXd params_;
};

/// Adaptive-moment optimizer over a flat parameter vector.
class Adam {
 public:
  Adam(Eigen::Index size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& gradient);

  double learning_rate() const { return lr_; }
  long steps() const { return t_; }

  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace uemit
