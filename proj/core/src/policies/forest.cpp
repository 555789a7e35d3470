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

#include "uemit/policies/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "uemit/rng.hpp"

namespace uemit {

void ForestParams::validate() const {
  if (n_trees <= 0) throw std::invalid_argument("forest: n_trees must be > 0");
  if (max_depth < 0) throw std::invalid_argument("forest: max_depth must be >= 0");
  if (max_features < 0) throw std::invalid_argument("forest: max_features must be >= 0");
  if (min_samples_leaf < 1) throw std::invalid_argument("forest: min_samples_leaf must be >= 1");
  if (threads < 1) throw std::invalid_argument("forest: threads must be >= 1");
}

void LabeledSamples::add(std::span<const double> features, int label) {
  if (features.size() != n_features) throw std::invalid_argument("LabeledSamples: feature count mismatch");
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(label != 0 ? 1 : 0);
}

double gini_impurity(double positives, double total) {
  if (total <= 0.0) return 0.0;
  const double p = positives / total;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

double DecisionTree::predict(std::span<const double> x) const {
  int n = 0;
  while (nodes_[static_cast<std::size_t>(n)].feature >= 0) {
    const auto& node = nodes_[static_cast<std::size_t>(n)];
    n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(n)].probability;
}

int DecisionTree::depth() const {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int best = 0;
  while (!stack.empty()) {
    const auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const auto& node = nodes_[static_cast<std::size_t>(n)];
    if (node.feature >= 0) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return best;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const LabeledSamples& data, const ForestParams& params, std::size_t max_features, Rng& rng)
      : data_(data), params_(params), max_features_(max_features), rng_(rng) {
    features_.resize(data.n_features);
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> samples) {
    DecisionTree tree;
    grow(tree, samples, 0);
    return tree;
  }

 private:
  int grow(DecisionTree& tree, std::vector<std::size_t>& samples, int depth) {
    const int id = static_cast<int>(tree.nodes().size());
    tree.nodes().emplace_back();
    double pos = 0;
    for (auto s : samples) pos += data_.y[s];
    const double total = static_cast<double>(samples.size());
    tree.nodes()[static_cast<std::size_t>(id)].probability = total > 0 ? pos / total : 0.0;

    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    if (depth >= params_.max_depth || pos == 0.0 || pos == total || samples.size() < 2 * min_leaf) return id;

    // Random feature subset via partial Fisher-Yates.
    for (std::size_t k = 0; k < max_features_; ++k) {
      const auto j = k + static_cast<std::size_t>(rng_.uniform_index(features_.size() - k));
      std::swap(features_[k], features_[j]);
    }

    const double parent = gini_impurity(pos, total);
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> column(samples.size());
    for (std::size_t k = 0; k < max_features_; ++k) {
      const std::size_t f = features_[k];
      for (std::size_t i = 0; i < samples.size(); ++i)
        column[i] = {data_.x[samples[i] * data_.n_features + f], data_.y[samples[i]]};
      std::sort(column.begin(), column.end());
      double left_pos = 0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left_pos += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1), nr = total - nl;
        if (i + 1 < min_leaf || column.size() - i - 1 < min_leaf) continue;
        const double child = (nl * gini_impurity(left_pos, nl) + nr * gini_impurity(pos - left_pos, nr)) / total;
        const double gain = parent - child;
        if (gain > best_gain + 1e-15) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          // The largest value that goes left, so the split depends only on the ordering of values.
          best_threshold = column[i].first;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto s : samples) {
      (data_.x[s * data_.n_features + static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
          .push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    const int l = grow(tree, left, depth + 1);
    const int r = grow(tree, right, depth + 1);
    auto& node = tree.nodes()[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const LabeledSamples& data_;
  const ForestParams& params_;
  std::size_t max_features_;
  Rng& rng_;
  std::vector<std::size_t> features_;
};

DecisionTree train_tree(const LabeledSamples& data, const ForestParams& params, std::size_t max_features,
                        const std::vector<std::size_t>& minority, const std::vector<std::size_t>& majority,
                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> pool = minority;
  std::vector<std::size_t> maj = majority;
  std::size_t take = maj.size();
  if (params.undersample_ratio > 0.0) {
    const auto cap = static_cast<std::size_t>(std::floor(params.undersample_ratio * static_cast<double>(minority.size())));
    take = std::min(take, std::max<std::size_t>(cap, 1));
  }
  for (std::size_t k = 0; k < take; ++k) {
    const auto j = k + static_cast<std::size_t>(rng.uniform_index(maj.size() - k));
    std::swap(maj[k], maj[j]);
  }
  pool.insert(pool.end(), maj.begin(), maj.begin() + static_cast<std::ptrdiff_t>(take));
  std::vector<std::size_t> boot(pool.size());
  for (auto& b : boot) b = pool[rng.uniform_index(pool.size())];
  TreeBuilder builder(data, params, max_features, rng);
  return builder.build(std::move(boot));
}

}  // namespace

RandomForest train_rf(const LabeledSamples& data, const ForestParams& params) {
  params.validate();
  if (data.n_features == 0) throw std::invalid_argument("train_rf: no features");
  RandomForest forest;
  forest.n_features_ = data.n_features;

  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < data.size(); ++i) (data.y[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    forest.degenerate_ = true;
    DecisionTree t;
    t.nodes().push_back({-1, 0.0, -1, -1, pos.empty() ? 0.0 : 1.0});
    forest.trees_.push_back(std::move(t));
    return forest;
  }
  const auto& minority = pos.size() <= neg.size() ? pos : neg;
  const auto& majority = pos.size() <= neg.size() ? neg : pos;

  std::size_t max_features = params.max_features > 0
                                 ? static_cast<std::size_t>(params.max_features)
                                 : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(data.n_features))));
  max_features = std::clamp<std::size_t>(max_features, 1, data.n_features);

  const auto n = static_cast<std::size_t>(params.n_trees);
  forest.trees_.resize(n);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t t = begin; t < n; t += step)
      forest.trees_[t] = train_tree(data, params, max_features, minority, majority, derive_seed(params.seed, t));
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(params.threads), n);
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(work, k, threads);
  }
  return forest;
}

double RandomForest::predict_proba(std::span<const double> x) const {
  if (x.size() != n_features_) throw std::invalid_argument("RandomForest: feature count mismatch");
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(x);
  return sum / static_cast<double>(trees_.size());
}

nlohmann::json RandomForest::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes()) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.probability});
    trees.push_back(std::move(nodes));
  }
  return {{"format", "uemit-forest"},
          {"version", 1},
          {"n_features", n_features_},
          {"degenerate", degenerate_},
          {"trees", std::move(trees)}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "uemit-forest") throw std::runtime_error("not a uemit forest");
  if (j.at("version").get<int>() != 1) throw std::runtime_error("unsupported forest version");
  RandomForest f;
  f.n_features_ = j.at("n_features").get<std::size_t>();
  f.degenerate_ = j.at("degenerate").get<bool>();
  for (const auto& jt : j.at("trees")) {
    DecisionTree t;
    for (const auto& jn : jt) {
      t.nodes().push_back({jn.at(0).get<int>(), jn.at(1).get<double>(), jn.at(2).get<int>(), jn.at(3).get<int>(),
                           jn.at(4).get<double>()});
    }
    const int size = static_cast<int>(t.nodes().size());
    for (const auto& n : t.nodes()) {
      if (n.feature >= 0 && (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size ||
                             n.feature >= static_cast<int>(f.n_features_)))
        throw std::runtime_error("corrupt forest node");
    }
    if (t.nodes().empty()) throw std::runtime_error("empty tree in forest");
    f.trees_.push_back(std::move(t));
  }
  if (f.trees_.empty()) throw std::runtime_error("forest has no trees");
  return f;
}

}  // namespace uemit
