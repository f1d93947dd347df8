// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Multi-view fusion: a squeeze-excite gated global branch over per-view CLS
// tokens and a transformer local branch over per-view patch features.

#pragma once

#include <span>
#include <vector>

#include "mvfsad/nn.hpp"

namespace mvfsad {

struct FusionConfig {
  std::vector<int> view_indices{5, 9, 14, 19, 27};  // 1-based into the view grid
  int se_reduction = 2;
  int blocks = 2;
  int heads = 4;
  int mlp_ratio = 4;

  int view_count() const { return static_cast<int>(view_indices.size()); }
};

class GlobalFusion {
 public:
  GlobalFusion() = default;
  GlobalFusion(int joint_dim, int views, int se_reduction, Rng& rng);

  /// views x (1 x C) -> 1 x C.
  Tensor forward(std::span<const Tensor> cls_views) const;
  /// Per-view gates (1 x views), each in (0, 1).
  Tensor gates(std::span<const Tensor> cls_views) const;
  void collect(ParamList& out, const std::string& prefix) const;
  int views() const { return views_; }

 private:
  Tensor stack(std::span<const Tensor> cls_views) const;
  Tensor gates_of(const Tensor& stacked) const;

  int views_ = 0;
  int joint_dim_ = 0;
  Linear excite1_;
  Linear excite2_;
  Linear fc_;
};

class LocalFusion {
 public:
  LocalFusion() = default;
  LocalFusion(int feature_dim, int joint_dim, int views, const FusionConfig& config, Rng& rng);

  /// views x (N_p x D) -> N_p x C. Views are stacked along the token axis so
  /// attention can mix them, then mean-pooled per token position.
  Tensor forward(std::span<const Tensor> feat_views) const;
  void collect(ParamList& out, const std::string& prefix) const;
  int views() const { return views_; }

 private:
  int views_ = 0;
  int feature_dim_ = 0;
  std::vector<TransformerBlock> blocks_;
  Linear proj_;
};

/// Elementwise sum; shapes must match.
Tensor enhance(const Tensor& adapted, const Tensor& fused);

}  // namespace mvfsad
