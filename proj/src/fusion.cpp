// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/fusion.hpp"

#include <algorithm>
#include <string>

#include "mvfsad/errors.hpp"

namespace mvfsad {

GlobalFusion::GlobalFusion(int joint_dim, int views, int se_reduction, Rng& rng)
    : views_(views), joint_dim_(joint_dim) {
  if (views < 1) throw InvalidArgument("GlobalFusion: need at least one view");
  if (se_reduction < 1) throw InvalidArgument("GlobalFusion: reduction must be >= 1");
  const int hidden = std::max(1, views / se_reduction);
  excite1_ = Linear(views, hidden, rng, Trainable::kYes);
  excite2_ = Linear(hidden, views, rng, Trainable::kYes);
  fc_ = Linear(views * joint_dim, joint_dim, rng, Trainable::kYes);
}

Tensor GlobalFusion::stack(std::span<const Tensor> cls_views) const {
  if (static_cast<int>(cls_views.size()) != views_) {
    throw InvalidArgument("GlobalFusion: expected " + std::to_string(views_) + " views, got " +
                          std::to_string(cls_views.size()));
  }
  for (const Tensor& v : cls_views) {
    if (v.rows() != 1 || v.cols() != joint_dim_) throw InvalidArgument("GlobalFusion: each view must be 1 x C");
  }
  return ops::concat_rows(cls_views);
}

Tensor GlobalFusion::gates_of(const Tensor& stacked) const {
  // Squeeze each view to one scalar, excite through the bottleneck.
  const Tensor squeezed = ops::transpose(ops::mean_cols(stacked));
  return ops::sigmoid(excite2_.forward(ops::gelu(excite1_.forward(squeezed))));
}

Tensor GlobalFusion::gates(std::span<const Tensor> cls_views) const { return gates_of(stack(cls_views)); }

Tensor GlobalFusion::forward(std::span<const Tensor> cls_views) const {
  const Tensor stacked = stack(cls_views);
  const Tensor weighted = ops::scale_rows(stacked, gates_of(stacked));
  return fc_.forward(ops::reshape(weighted, 1, static_cast<Eigen::Index>(views_) * joint_dim_));
}

void GlobalFusion::collect(ParamList& out, const std::string& prefix) const {
  excite1_.collect(out, prefix + ".excite1");
  excite2_.collect(out, prefix + ".excite2");
  fc_.collect(out, prefix + ".fc");
}

LocalFusion::LocalFusion(int feature_dim, int joint_dim, int views, const FusionConfig& config, Rng& rng)
    : views_(views), feature_dim_(feature_dim) {
  if (views < 1) throw InvalidArgument("LocalFusion: need at least one view");
  for (int b = 0; b < config.blocks; ++b) {
    blocks_.emplace_back(feature_dim, config.heads, config.mlp_ratio, rng, Trainable::kYes);
  }
  proj_ = Linear(feature_dim, joint_dim, rng, Trainable::kYes);
}

Tensor LocalFusion::forward(std::span<const Tensor> feat_views) const {
  if (static_cast<int>(feat_views.size()) != views_) {
    throw InvalidArgument("LocalFusion: expected " + std::to_string(views_) + " views, got " +
                          std::to_string(feat_views.size()));
  }
  const Eigen::Index tokens = feat_views[0].rows();
  for (const Tensor& v : feat_views) {
    if (v.rows() != tokens || v.cols() != feature_dim_) {
      throw InvalidArgument("LocalFusion: all views must be N_p x D with identical shapes");
    }
  }
  Tensor x = ops::concat_rows(feat_views);
  for (const auto& block : blocks_) x = block.forward(x);
  Tensor pooled = ops::slice_rows(x, 0, tokens);
  for (int v = 1; v < views_; ++v) pooled = ops::add(pooled, ops::slice_rows(x, v * tokens, tokens));
  pooled = ops::scale(pooled, 1.0 / views_);
  return proj_.forward(pooled);
}

void LocalFusion::collect(ParamList& out, const std::string& prefix) const {
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b].collect(out, prefix + ".block" + std::to_string(b));
  proj_.collect(out, prefix + ".proj");
}

Tensor enhance(const Tensor& adapted, const Tensor& fused) {
  if (adapted.rows() != fused.rows() || adapted.cols() != fused.cols()) {
    throw InvalidArgument("enhance: shape mismatch");
  }
  return ops::add(adapted, fused);
}

}  // namespace mvfsad
