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

#include "uemit/agent/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uemit {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity), leaves_(1) {
  if (capacity == 0) throw std::invalid_argument("SumTree: capacity must be > 0");
  while (leaves_ < capacity) leaves_ <<= 1;
  tree_.assign(2 * leaves_, 0.0);
}

void SumTree::set(std::size_t index, double weight) {
  if (index >= capacity_) throw std::out_of_range("SumTree::set");
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw std::invalid_argument("SumTree: weight must be finite and >= 0");
  std::size_t node = leaves_ + index;
  tree_[node] = weight;
  // Recompute parents from children instead of adding deltas, so no drift accumulates.
  for (node >>= 1; node >= 1; node >>= 1) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
}

std::size_t SumTree::find(double mass) const {
  std::size_t node = 1;
  while (node < leaves_) {
    const std::size_t left = 2 * node;
    if (mass < tree_[left] || tree_[left + 1] <= 0.0) {
      node = left;
    } else {
      mass -= tree_[left];
      node = left + 1;
    }
  }
  std::size_t index = node - leaves_;
  // Rounding at the right edge can land on an empty leaf; step back to the last filled one.
  while (tree_[leaves_ + index] <= 0.0 && index > 0) --index;
  return index;
}

PrioritizedReplay::PrioritizedReplay(std::size_t capacity, double alpha, double priority_epsilon)
    : items_(capacity), tree_(capacity), alpha_(alpha), eps_p_(priority_epsilon) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("PrioritizedReplay: alpha must be >= 0");
  if (!(priority_epsilon > 0.0)) throw std::invalid_argument("PrioritizedReplay: priority epsilon must be > 0");
}

void PrioritizedReplay::add(const StoredTransition& transition) {
  items_[next_] = transition;
  tree_.set(next_, std::pow(max_priority_, alpha_));
  next_ = (next_ + 1) % items_.size();
  size_ = std::min(size_ + 1, items_.size());
}

void PrioritizedReplay::set_priority(std::size_t index, double priority) {
  if (index >= size_) throw std::out_of_range("PrioritizedReplay::set_priority");
  if (!(priority > 0.0)) throw std::invalid_argument("priority must be > 0");
  max_priority_ = std::max(max_priority_, priority);
  tree_.set(index, std::pow(priority, alpha_));
}

void PrioritizedReplay::update_priorities(const std::vector<std::size_t>& indices,
                                          const std::vector<double>& td_errors) {
  if (indices.size() != td_errors.size()) throw std::invalid_argument("update_priorities: size mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) set_priority(indices[k], std::abs(td_errors[k]) + eps_p_);
}

double PrioritizedReplay::probability(std::size_t index) const { return tree_.get(index) / tree_.total(); }

ReplaySample PrioritizedReplay::sample(std::size_t batch, double beta, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("PrioritizedReplay::sample on empty buffer");
  ReplaySample out;
  out.indices.resize(batch);
  out.weights.resize(batch);
  const double total = tree_.total();
  const double n = static_cast<double>(size_);
  double max_w = 0.0;
  for (std::size_t k = 0; k < batch; ++k) {
    const std::size_t i = tree_.find(rng.uniform() * total);
    out.indices[k] = i;
    out.weights[k] = std::pow(n * tree_.get(i) / total, -beta);
    max_w = std::max(max_w, out.weights[k]);
  }
  for (auto& w : out.weights) w /= max_w;
  return out;
}

}  // namespace uemit
