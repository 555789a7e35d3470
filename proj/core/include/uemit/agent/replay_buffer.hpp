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
#include <vector>

#include "uemit/features.hpp"
#include "uemit/rng.hpp"

namespace uemit {

/// Binary tree of non-negative weights supporting O(log n) update and
/// prefix-sum search.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  void set(std::size_t index, double weight);
  double get(std::size_t index) const { return tree_[leaves_ + index]; }
  double total() const { return tree_[1]; }
  std::size_t capacity() const { return capacity_; }

  /// Smallest index i with weight(0..i) > mass; mass must lie in [0, total).
  /// Items of zero weight are never returned.
  std::size_t find(double mass) const;

 private:
  std::size_t capacity_;
  std::size_t leaves_;
  std::vector<double> tree_;
};

/// Replay transition with states already normalized.
struct StoredTransition {
  std::array<double, kFeatureCount> state{};
  std::array<double, kFeatureCount> next_state{};
  int action = 0;
  double reward = 0.0;
  bool terminal = false;
};

struct ReplaySample {
  std::vector<std::size_t> indices;
  std::vector<double> weights;  // importance weights, max-normalized within the batch
};

/// Proportional prioritized replay: item i has priority p_i = |TD_i| + eps_p
/// and is drawn with probability p_i^alpha / sum_j p_j^alpha.
class PrioritizedReplay {
 public:
  PrioritizedReplay(std::size_t capacity, double alpha, double priority_epsilon = 1e-6);

  /// Inserts with the largest priority seen so far, overwriting the oldest item when full.
  void add(const StoredTransition& transition);

  /// Draws `batch` items independently with replacement. Weights are
  /// (N * P(i))^-beta divided by their batch maximum.
  ReplaySample sample(std::size_t batch, double beta, Rng& rng) const;

  void update_priorities(const std::vector<std::size_t>& indices, const std::vector<double>& td_errors);
  /// Sets a raw priority directly (before the alpha exponent).
  void set_priority(std::size_t index, double priority);

  const StoredTransition& at(std::size_t index) const { return items_[index]; }
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return items_.size(); }
  double alpha() const { return alpha_; }
  double probability(std::size_t index) const;

 private:
  std::vector<StoredTransition> items_;
  SumTree tree_;
  double alpha_;
  double eps_p_;
  double max_priority_ = 1.0;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

}  // namespace uemit
