// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mvfsad/random.hpp"
#include "mvfsad/tensor.hpp"

namespace mvfsad {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};
using ParamList = std::vector<NamedTensor>;

/// Whether a layer's parameters receive gradients.
enum class Trainable { kNo, kYes };

Tensor make_weight(Matrix value, Trainable trainable);

/// y = x W + b, W stored in x out.
class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, Rng& rng, Trainable trainable, bool with_bias = true, double init_gain = 1.0);

  Tensor forward(const Tensor& x) const;
  void collect(ParamList& out, const std::string& prefix) const;

  int in_features() const { return static_cast<int>(weight_.rows()); }
  int out_features() const { return static_cast<int>(weight_.cols()); }
  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }

 private:
  Tensor weight_;
  Tensor bias_;  // undefined when built without bias
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(int dim, Trainable trainable);

  Tensor forward(const Tensor& x) const;
  void collect(ParamList& out, const std::string& prefix) const;

 private:
  Tensor gamma_;
  Tensor beta_;
};

class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(int dim, int heads, Rng& rng, Trainable trainable);

  /// Self-attention over the rows (tokens) of x.
  Tensor forward(const Tensor& x) const;
  void collect(ParamList& out, const std::string& prefix) const;

 private:
  int dim_ = 0;
  int heads_ = 0;
  Linear qkv_;
  Linear proj_;
};

/// Pre-norm transformer block: x + attn(ln(x)), then x + mlp(ln(x)).
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(int dim, int heads, int mlp_ratio, Rng& rng, Trainable trainable);

  Tensor forward(const Tensor& x) const;
  void collect(ParamList& out, const std::string& prefix) const;

 private:
  LayerNorm ln1_;
  MultiHeadAttention attn_;
  LayerNorm ln2_;
  Linear fc1_;
  Linear fc2_;
};

/// FNV-1a over the raw bytes of every tensor in order; used for freeze checks.
std::uint64_t checksum(const ParamList& params);

std::size_t parameter_count(const ParamList& params);

}  // namespace mvfsad
