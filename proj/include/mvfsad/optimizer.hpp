// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mvfsad/nn.hpp"

namespace mvfsad {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct ParamGroup {
  std::string name;
  double lr = 1e-3;
  ParamList params;
};

/// Adam with a learning rate per parameter group.
class Adam {
 public:
  Adam(std::vector<ParamGroup> groups, const AdamConfig& config = {});

  /// Applies one update from the gradients currently held by the parameters.
  /// Parameters without a gradient are treated as having a zero gradient.
  void step();
  void zero_grad();
  long steps() const { return t_; }
  const std::vector<ParamGroup>& groups() const { return groups_; }

 private:
  struct Moments {
    Matrix m;
    Matrix v;
  };
  std::vector<ParamGroup> groups_;
  std::vector<std::vector<Moments>> state_;
  AdamConfig config_;
  long t_ = 0;
};

}  // namespace mvfsad
