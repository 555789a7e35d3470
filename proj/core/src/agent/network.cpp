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

#include "uemit/agent/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uemit {

QNetwork::QNetwork(int input_dim, std::vector<int> hidden) : input_dim_(input_dim), hidden_(std::move(hidden)) {
  if (input_dim_ <= 0 || hidden_.empty()) throw std::invalid_argument("QNetwork: bad architecture");
  Eigen::Index offset = 0;
  int in = input_dim_;
  auto add = [&](int out) {
    if (out <= 0) throw std::invalid_argument("QNetwork: layer width must be positive");
    layers_.push_back({in, out, offset});
    offset += static_cast<Eigen::Index>(in) * out + out;
  };
  for (int w : hidden_) {
    add(w);
    in = w;
  }
  add(1);
  add(kNumActions);
  params_ = Eigen::VectorXd::Zero(offset);
}

Eigen::Map<Eigen::MatrixXd> QNetwork::weight(std::size_t l) {
  const auto& L = layers_.at(l);
  return {params_.data() + L.offset, L.out, L.in};
}

Eigen::Map<const Eigen::MatrixXd> QNetwork::weight(std::size_t l) const {
  const auto& L = layers_.at(l);
  return {params_.data() + L.offset, L.out, L.in};
}

Eigen::Map<Eigen::VectorXd> QNetwork::bias(std::size_t l) {
  const auto& L = layers_.at(l);
  return {params_.data() + L.offset + static_cast<Eigen::Index>(L.in) * L.out, L.out};
}

Eigen::Map<const Eigen::VectorXd> QNetwork::bias(std::size_t l) const {
  const auto& L = layers_.at(l);
  return {params_.data() + L.offset + static_cast<Eigen::Index>(L.in) * L.out, L.out};
}

void QNetwork::initialize(Rng& rng) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layers_[l].in));
    auto W = weight(l);
    auto b = bias(l);
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      for (Eigen::Index i = 0; i < W.rows(); ++i) W(i, j) = rng.uniform(-bound, bound);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-bound, bound);
  }
}

std::vector<Eigen::MatrixXd> QNetwork::trunk(const Eigen::MatrixXd& states) const {
  if (states.rows() != input_dim_) throw std::invalid_argument("QNetwork: input dimension mismatch");
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(hidden_.size() + 1);
  acts.push_back(states);
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    Eigen::MatrixXd z = weight(l) * acts.back();
    z.colwise() += bias(l);
    acts.push_back(z.cwiseMax(0.0));
  }
  return acts;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& states) const {
  const auto acts = trunk(states);
  const auto& h = acts.back();
  Eigen::RowVectorXd v = weight(value_layer()) * h;
  v.array() += bias(value_layer())(0);
  Eigen::MatrixXd a = weight(advantage_layer()) * h;
  a.colwise() += bias(advantage_layer());
  const Eigen::RowVectorXd mean = a.colwise().mean();
  Eigen::MatrixXd q(kNumActions, states.cols());
  for (int k = 0; k < kNumActions; ++k) q.row(k) = v + a.row(k) - mean;
  return q;
}

std::array<double, kNumActions> QNetwork::forward(std::span<const double> state) const {
  if (static_cast<int>(state.size()) != input_dim_) throw std::invalid_argument("QNetwork: input dimension mismatch");
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(state.data(), input_dim_);
  const Eigen::MatrixXd q = forward_batch(x);
  return {q(0, 0), q(1, 0)};
}

double QNetwork::value(std::span<const double> state) const {
  if (static_cast<int>(state.size()) != input_dim_) throw std::invalid_argument("QNetwork: input dimension mismatch");
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(state.data(), input_dim_);
  const auto acts = trunk(x);
  return (weight(value_layer()) * acts.back())(0, 0) + bias(value_layer())(0);
}

double QNetwork::loss_and_gradient(const Eigen::MatrixXd& states, std::span<const int> actions,
                                   std::span<const double> targets, std::span<const double> weights,
                                   Eigen::VectorXd& gradient, std::vector<double>* td_errors) const {
  const Eigen::Index B = states.cols();
  if (static_cast<Eigen::Index>(actions.size()) != B || static_cast<Eigen::Index>(targets.size()) != B ||
      static_cast<Eigen::Index>(weights.size()) != B || B == 0)
    throw std::invalid_argument("QNetwork::loss_and_gradient: batch size mismatch");

  const auto acts = trunk(states);
  const auto& h = acts.back();
  const std::size_t lv = value_layer(), la = advantage_layer();
  Eigen::RowVectorXd v = weight(lv) * h;
  v.array() += bias(lv)(0);
  Eigen::MatrixXd a = weight(la) * h;
  a.colwise() += bias(la);

  // dL/dV and dL/dA per sample. dQ_a/dA_k = [a == k] - 1/K.
  Eigen::RowVectorXd dv(B);
  Eigen::MatrixXd da(kNumActions, B);
  double loss = 0.0;
  if (td_errors) td_errors->resize(static_cast<std::size_t>(B));
  const double inv_b = 1.0 / static_cast<double>(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    const int act = actions[static_cast<std::size_t>(i)];
    if (act < 0 || act >= kNumActions) throw std::invalid_argument("action out of range");
    const double q = v(i) + a(act, i) - a.col(i).mean();
    const double err = q - targets[static_cast<std::size_t>(i)];
    if (td_errors) (*td_errors)[static_cast<std::size_t>(i)] = err;
    const double w = weights[static_cast<std::size_t>(i)];
    const double abs_err = std::abs(err);
    loss += w * (abs_err <= 1.0 ? 0.5 * err * err : abs_err - 0.5);
    const double g = w * std::clamp(err, -1.0, 1.0) * inv_b;
    dv(i) = g;
    for (int k = 0; k < kNumActions; ++k) da(k, i) = g * ((k == act ? 1.0 : 0.0) - 1.0 / kNumActions);
  }
  loss *= inv_b;

  gradient.setZero(params_.size());
  auto grad_w = [&](std::size_t l) {
    const auto& L = layers_[l];
    return Eigen::Map<Eigen::MatrixXd>(gradient.data() + L.offset, L.out, L.in);
  };
  auto grad_b = [&](std::size_t l) {
    const auto& L = layers_[l];
    return Eigen::Map<Eigen::VectorXd>(gradient.data() + L.offset + static_cast<Eigen::Index>(L.in) * L.out, L.out);
  };

  grad_w(lv).noalias() = dv * h.transpose();
  grad_b(lv)(0) = dv.sum();
  grad_w(la).noalias() = da * h.transpose();
  grad_b(la) = da.rowwise().sum();

  Eigen::MatrixXd delta = weight(lv).transpose() * dv;
  delta.noalias() += weight(la).transpose() * da;
  for (std::size_t l = hidden_.size(); l-- > 0;) {
    delta = delta.cwiseProduct((acts[l + 1].array() > 0.0).cast<double>().matrix());
    grad_w(l).noalias() = delta * acts[l].transpose();
    grad_b(l) = delta.rowwise().sum();
    if (l > 0) delta = weight(l).transpose() * delta;
  }
  return loss;
}

Adam::Adam(Eigen::Index size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)) {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("Adam: learning rate must be > 0");
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& gradient) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * gradient;
  v_ = beta2_ * v_ + (1.0 - beta2_) * gradient.cwiseProduct(gradient);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

}  // namespace uemit
