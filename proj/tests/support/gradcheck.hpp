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

#include <algorithm>
#include <cmath>
#include <vector>

#include "uemit/agent/network.hpp"
#include "uemit/rng.hpp"

namespace uemit::test {

struct GradCheck {
  double max_relative_error = 0.0;
  Eigen::Index parameters = 0;
};

/// Analytic gradient of the weighted Huber loss against central differences
/// for a random network of the given shape. Targets keep every TD error at
/// least 0.05 away from the Huber kink. Relative errors use a 1e-6 floor on the
/// denominator so vanishing gradients do not divide by zero.
inline GradCheck gradient_check(Rng& rng, int input_dim, const std::vector<int>& hidden, int batch) {
  QNetwork net(input_dim, hidden);
  net.initialize(rng);
  Eigen::MatrixXd x(input_dim, batch);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-2.0, 2.0);
  std::vector<int> actions(static_cast<std::size_t>(batch));
  std::vector<double> weights(actions.size()), targets(actions.size());
  const Eigen::MatrixXd q = net.forward_batch(x);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    actions[i] = static_cast<int>(rng.uniform_index(kNumActions));
    weights[i] = rng.uniform(0.2, 1.0);
    // TD error magnitude in [0.05, 0.95] or [1.05, 3].
    const double mag = rng.bernoulli(0.5) ? rng.uniform(0.05, 0.95) : rng.uniform(1.05, 3.0);
    targets[i] = q(actions[i], static_cast<Eigen::Index>(i)) + (rng.bernoulli(0.5) ? mag : -mag);
  }
  Eigen::VectorXd analytic;
  net.loss_and_gradient(x, actions, targets, weights, analytic);

  GradCheck out;
  out.parameters = net.num_parameters();
  const double h = 1e-6;
  Eigen::VectorXd scratch;
  for (Eigen::Index p = 0; p < net.num_parameters(); ++p) {
    const double saved = net.parameters()(p);
    net.parameters()(p) = saved + h;
    const double up = net.loss_and_gradient(x, actions, targets, weights, scratch);
    net.parameters()(p) = saved - h;
    const double down = net.loss_and_gradient(x, actions, targets, weights, scratch);
    net.parameters()(p) = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic(p);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(a - numeric) / denom);
  }
  return out;
}

}  // namespace uemit::test
