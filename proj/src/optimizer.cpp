// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/optimizer.hpp"

#include <cmath>

#include "mvfsad/errors.hpp"

namespace mvfsad {

Adam::Adam(std::vector<ParamGroup> groups, const AdamConfig& config) : groups_(std::move(groups)), config_(config) {
  for (const auto& g : groups_) {
    if (!(g.lr > 0.0)) throw InvalidArgument("Adam: learning rate of group " + g.name + " must be positive");
    std::vector<Moments> moments;
    for (const auto& p : g.params) {
      if (!p.tensor.requires_grad()) throw InvalidArgument("Adam: " + p.name + " is not trainable");
      moments.push_back({Matrix::Zero(p.tensor.rows(), p.tensor.cols()), Matrix::Zero(p.tensor.rows(), p.tensor.cols())});
    }
    state_.push_back(std::move(moments));
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    auto& group = groups_[gi];
    for (std::size_t pi = 0; pi < group.params.size(); ++pi) {
      Tensor& p = group.params[pi].tensor;
      Moments& s = state_[gi][pi];
      if (p.grad().size() == 0) {
        s.m *= config_.beta1;
        s.v *= config_.beta2;
      } else {
        s.m = config_.beta1 * s.m + (1.0 - config_.beta1) * p.grad();
        s.v = config_.beta2 * s.v + (1.0 - config_.beta2) * p.grad().cwiseAbs2();
      }
      const auto m_hat = s.m.array() / bc1;
      const auto v_hat = s.v.array() / bc2;
      p.mutable_value().array() -= group.lr * m_hat / (v_hat.sqrt() + config_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (auto& g : groups_) {
    for (auto& p : g.params) p.tensor.zero_grad();
  }
}

}  // namespace mvfsad
