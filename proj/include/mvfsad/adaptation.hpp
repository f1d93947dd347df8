// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Trainable adapters, the coarse-to-fine decoder, and the patch/text
// similarity -> anomaly map head.

#pragma once

#include <map>
#include <span>
#include <vector>

#include "mvfsad/nn.hpp"

namespace mvfsad {

struct AdapterConfig {
  double hidden_ratio = 0.25;
  double alpha = 0.2;  // residual blend
};

/// out = alpha * MLP(x) + (1 - alpha) * x, applied row-wise.
class Adapter {
 public:
  Adapter() = default;
  Adapter(int dim, const AdapterConfig& config, Rng& rng);

  Tensor forward(const Tensor& x) const;
  void collect(ParamList& out, const std::string& prefix) const;

  double alpha() const { return alpha_; }
  Linear& fc1() { return fc1_; }
  Linear& fc2() { return fc2_; }

 private:
  double alpha_ = 0.2;
  Linear fc1_;
  Linear fc2_;
};

struct DecoderConfig {
  int blocks = 2;
  int heads = 4;
  int mlp_ratio = 4;
};

/// Projects each stage D -> C, concatenates channels (N_p x kC), runs
/// transformer blocks at width kC and projects to N_p x C.
class CoarseToFineDecoder {
 public:
  CoarseToFineDecoder() = default;
  CoarseToFineDecoder(int feature_dim, int joint_dim, std::vector<int> stage_ids, const DecoderConfig& config,
                      Rng& rng);

  Tensor forward(const std::map<int, Tensor>& stages) const;
  void collect(ParamList& out, const std::string& prefix) const;
  const std::vector<int>& stage_ids() const { return stage_ids_; }

 private:
  std::vector<int> stage_ids_;
  int feature_dim_ = 0;
  std::vector<Linear> stage_proj_;
  std::vector<TransformerBlock> blocks_;
  Linear out_proj_;
};

constexpr double kSimilarityTemperature = 0.07;

/// Row-normalized patch features against row-normalized text rows, over gamma.
/// Column 0 is the normal text, column 1 the anomalous text.
Tensor similarity_map(const Tensor& features, const Tensor& seg_text, double gamma = kSimilarityTemperature);

/// Softmax over each row, anomalous column, reshaped to the square patch grid
/// and bilinearly resized (corner aligned) to out_h x out_w.
Tensor anomaly_map(const Tensor& similarity, int out_h, int out_w);

/// Corner-aligned 1D bilinear interpolation matrix (out x in).
Matrix bilinear_matrix(int in, int out);

}  // namespace mvfsad
