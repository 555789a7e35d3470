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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace uemit {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 12;
  int max_features = 0;             // per split; 0 means floor(sqrt(d))
  double undersample_ratio = 10.0;  // majority:minority cap per tree; <= 0 disables
  int min_samples_leaf = 1;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

/// Row-major design matrix with binary labels.
struct LabeledSamples {
  std::size_t n_features = 0;
  std::vector<double> x;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * n_features, n_features}; }
  void add(std::span<const double> features, int label);
};

/// CART node. Internal nodes send x[feature] <= threshold to `left`; leaves
/// have feature == -1 and carry the positive-class fraction.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double probability = 0.0;
};

class DecisionTree {
 public:
  double predict(std::span<const double> x) const;
  std::vector<TreeNode>& nodes() { return nodes_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

/// Gini impurity 1 - p^2 - (1-p)^2 of a node with `positives` out of `total`.
double gini_impurity(double positives, double total);

class RandomForest {
 public:
  /// Mean of the trees' leaf probabilities.
  double predict_proba(std::span<const double> x) const;

  std::size_t n_features() const { return n_features_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  /// True when training data held a single class; predictions are then constant.
  bool degenerate() const { return degenerate_; }

  nlohmann::json to_json() const;
  static RandomForest from_json(const nlohmann::json& j);

 private:
  friend RandomForest train_rf(const LabeledSamples&, const ForestParams&);
  std::size_t n_features_ = 0;
  std::vector<DecisionTree> trees_;
  bool degenerate_ = false;
};

/// Trains a forest of Gini CART trees. Every tree sees all minority-class
/// samples plus a random subset of the majority capped at undersample_ratio
/// times the minority count, bootstrapped. Deterministic for a fixed seed,
/// independent of the thread count. An empty or single-class training set
/// yields a degenerate forest with a constant probability.
RandomForest train_rf(const LabeledSamples& data, const ForestParams& params);

}  // namespace uemit
