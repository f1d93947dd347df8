// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/nn.hpp"

#include <cmath>
#include <string_view>

#include "mvfsad/errors.hpp"

namespace mvfsad {

Tensor make_weight(Matrix value, Trainable trainable) {
  return trainable == Trainable::kYes ? Tensor::parameter(std::move(value)) : Tensor::constant(std::move(value));
}

namespace {

Matrix gaussian(int rows, int cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.normal();
  return m;
}

}  // namespace

Linear::Linear(int in, int out, Rng& rng, Trainable trainable, bool with_bias, double init_gain) {
  if (in <= 0 || out <= 0) throw InvalidArgument("Linear: dimensions must be positive");
  weight_ = make_weight(gaussian(in, out, init_gain / std::sqrt(static_cast<double>(in)), rng), trainable);
  if (with_bias) bias_ = make_weight(Matrix::Zero(1, out), trainable);
}

Tensor Linear::forward(const Tensor& x) const {
  Tensor y = ops::matmul(x, weight_);
  return bias_.defined() ? ops::add_row(y, bias_) : y;
}

void Linear::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + ".weight", weight_});
  if (bias_.defined()) out.push_back({prefix + ".bias", bias_});
}

LayerNorm::LayerNorm(int dim, Trainable trainable)
    : gamma_(make_weight(Matrix::Ones(1, dim), trainable)), beta_(make_weight(Matrix::Zero(1, dim), trainable)) {}

Tensor LayerNorm::forward(const Tensor& x) const { return ops::layer_norm_rows(x, gamma_, beta_); }

void LayerNorm::collect(ParamList& out, const std::string& prefix) const {
  out.push_back({prefix + ".gamma", gamma_});
  out.push_back({prefix + ".beta", beta_});
}

MultiHeadAttention::MultiHeadAttention(int dim, int heads, Rng& rng, Trainable trainable)
    : dim_(dim), heads_(heads), qkv_(dim, 3 * dim, rng, trainable), proj_(dim, dim, rng, trainable) {
  if (heads <= 0 || dim % heads != 0) throw InvalidArgument("MultiHeadAttention: dim must be divisible by heads");
}

Tensor MultiHeadAttention::forward(const Tensor& x) const {
  const Tensor qkv = qkv_.forward(x);
  const int head_dim = dim_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Tensor> outputs;
  outputs.reserve(static_cast<std::size_t>(heads_));
  for (int h = 0; h < heads_; ++h) {
    const Tensor q = ops::slice_cols(qkv, h * head_dim, head_dim);
    const Tensor k = ops::slice_cols(qkv, dim_ + h * head_dim, head_dim);
    const Tensor v = ops::slice_cols(qkv, 2 * dim_ + h * head_dim, head_dim);
    const Tensor attn = ops::softmax_rows(ops::scale(ops::matmul_nt(q, k), scale));
    outputs.push_back(ops::matmul(attn, v));
  }
  return proj_.forward(ops::concat_cols(outputs));
}

void MultiHeadAttention::collect(ParamList& out, const std::string& prefix) const {
  qkv_.collect(out, prefix + ".qkv");
  proj_.collect(out, prefix + ".proj");
}

TransformerBlock::TransformerBlock(int dim, int heads, int mlp_ratio, Rng& rng, Trainable trainable)
    : ln1_(dim, trainable),
      attn_(dim, heads, rng, trainable),
      ln2_(dim, trainable),
      fc1_(dim, dim * mlp_ratio, rng, trainable),
      fc2_(dim * mlp_ratio, dim, rng, trainable) {}

Tensor TransformerBlock::forward(const Tensor& x) const {
  const Tensor h = ops::add(x, attn_.forward(ln1_.forward(x)));
  return ops::add(h, fc2_.forward(ops::gelu(fc1_.forward(ln2_.forward(h)))));
}

void TransformerBlock::collect(ParamList& out, const std::string& prefix) const {
  ln1_.collect(out, prefix + ".ln1");
  attn_.collect(out, prefix + ".attn");
  ln2_.collect(out, prefix + ".ln2");
  fc1_.collect(out, prefix + ".fc1");
  fc2_.collect(out, prefix + ".fc2");
}

std::uint64_t checksum(const ParamList& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : params) {
    h = fnv1a64(p.name, h);
    const Matrix& v = p.tensor.value();
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(v.data()), sizeof(double) * v.size()), h);
  }
  return h;
}

std::size_t parameter_count(const ParamList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += static_cast<std::size_t>(p.tensor.value().size());
  return n;
}

}  // namespace mvfsad
