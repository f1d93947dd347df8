// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvfsad/errors.hpp"

namespace mvfsad {

Adapter::Adapter(int dim, const AdapterConfig& config, Rng& rng) : alpha_(config.alpha) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw InvalidArgument("Adapter: alpha must be in [0, 1]");
  const int hidden = std::max(1, static_cast<int>(std::lround(dim * config.hidden_ratio)));
  fc1_ = Linear(dim, hidden, rng, Trainable::kYes);
  fc2_ = Linear(hidden, dim, rng, Trainable::kYes);
}

Tensor Adapter::forward(const Tensor& x) const {
  const Tensor mlp = fc2_.forward(ops::gelu(fc1_.forward(x)));
  return ops::add(ops::scale(mlp, alpha_), ops::scale(x, 1.0 - alpha_));
}

void Adapter::collect(ParamList& out, const std::string& prefix) const {
  fc1_.collect(out, prefix + ".fc1");
  fc2_.collect(out, prefix + ".fc2");
}

CoarseToFineDecoder::CoarseToFineDecoder(int feature_dim, int joint_dim, std::vector<int> stage_ids,
                                         const DecoderConfig& config, Rng& rng)
    : stage_ids_(std::move(stage_ids)), feature_dim_(feature_dim) {
  if (stage_ids_.empty()) throw InvalidArgument("CoarseToFineDecoder: no stages");
  const int width = joint_dim * static_cast<int>(stage_ids_.size());
  for (std::size_t i = 0; i < stage_ids_.size(); ++i) stage_proj_.emplace_back(feature_dim, joint_dim, rng, Trainable::kYes);
  for (int b = 0; b < config.blocks; ++b) {
    blocks_.emplace_back(width, config.heads, config.mlp_ratio, rng, Trainable::kYes);
  }
  out_proj_ = Linear(width, joint_dim, rng, Trainable::kYes);
}

Tensor CoarseToFineDecoder::forward(const std::map<int, Tensor>& stages) const {
  std::vector<Tensor> projected;
  projected.reserve(stage_ids_.size());
  Eigen::Index tokens = -1;
  for (std::size_t i = 0; i < stage_ids_.size(); ++i) {
    const auto it = stages.find(stage_ids_[i]);
    if (it == stages.end()) {
      throw InvalidArgument("CoarseToFineDecoder: missing stage " + std::to_string(stage_ids_[i]));
    }
    if (it->second.cols() != feature_dim_ || (tokens >= 0 && it->second.rows() != tokens)) {
      throw InvalidArgument("CoarseToFineDecoder: stage " + std::to_string(stage_ids_[i]) + " has the wrong shape");
    }
    tokens = it->second.rows();
    projected.push_back(stage_proj_[i].forward(it->second));
  }
  Tensor x = ops::concat_cols(projected);
  for (const auto& block : blocks_) x = block.forward(x);
  return out_proj_.forward(x);
}

void CoarseToFineDecoder::collect(ParamList& out, const std::string& prefix) const {
  for (std::size_t i = 0; i < stage_proj_.size(); ++i) {
    stage_proj_[i].collect(out, prefix + ".stage_proj" + std::to_string(stage_ids_[i]));
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b].collect(out, prefix + ".block" + std::to_string(b));
  out_proj_.collect(out, prefix + ".out_proj");
}

Tensor similarity_map(const Tensor& features, const Tensor& seg_text, double gamma) {
  if (seg_text.rows() != 2) throw InvalidArgument("similarity_map: segmentation text must have 2 rows");
  if (features.cols() != seg_text.cols()) throw InvalidArgument("similarity_map: feature and text widths differ");
  if (!(gamma > 0.0)) throw InvalidArgument("similarity_map: temperature must be positive");
  return ops::scale(ops::matmul_nt(ops::normalize_rows(features), ops::normalize_rows(seg_text)), 1.0 / gamma);
}

Matrix bilinear_matrix(int in, int out) {
  if (in <= 0 || out <= 0) throw InvalidArgument("bilinear_matrix: sizes must be positive");
  Matrix m = Matrix::Zero(out, in);
  for (int i = 0; i < out; ++i) {
    const double pos = (out == 1 || in == 1) ? 0.0 : static_cast<double>(i) * (in - 1) / (out - 1);
    const int lo = std::min(static_cast<int>(std::floor(pos)), in - 1);
    const int hi = std::min(lo + 1, in - 1);
    const double frac = pos - lo;
    m(i, lo) += 1.0 - frac;
    m(i, hi) += frac;
  }
  return m;
}

Tensor anomaly_map(const Tensor& similarity, int out_h, int out_w) {
  if (similarity.cols() != 2) throw InvalidArgument("anomaly_map: similarity must have 2 columns");
  const auto np = similarity.rows();
  const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(np))));
  if (side * side != np || np == 0) {
    throw InvalidArgument("anomaly_map: token count " + std::to_string(np) + " is not a perfect square");
  }
  const Tensor prob = ops::slice_cols(ops::softmax_rows(similarity), 1, 1);
  const Tensor grid = ops::reshape(prob, side, side);
  const Tensor rows = Tensor::constant(bilinear_matrix(static_cast<int>(side), out_h));
  const Tensor cols = Tensor::constant(bilinear_matrix(static_cast<int>(side), out_w));
  return ops::matmul_nt(ops::matmul(rows, grid), cols);
}

}  // namespace mvfsad
