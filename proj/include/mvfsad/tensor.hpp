// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal tape-based reverse-mode autodiff over dense double matrices.
//
// A Tensor is a shared handle to a graph node. Operations whose inputs do not
// require gradients produce plain constants and record nothing, so the frozen
// encoder runs through the same layer code without building a tape.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace mvfsad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad/value and pushes into parents.
  std::function<void(const Node& self)> backward;

  void accumulate(const Matrix& g);
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  /// Leaf that accumulates gradients.
  static Tensor parameter(Matrix value);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  /// In-place access for optimizers and finite-difference probes.
  Matrix& mutable_value() { return node_->value; }
  /// Gradient, or an empty matrix if nothing has flowed back.
  const Matrix& grad() const { return node_->grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double item() const;

  void zero_grad() const { node_->grad.resize(0, 0); }

  /// Reverse sweep from a 1x1 tensor.
  void backward() const;

  /// Shares the value, drops the tape.
  Tensor detach() const { return constant(node_->value); }

  // Internal: used by op implementations.
  static Tensor from_op(Matrix value, std::initializer_list<const Tensor*> inputs,
                        std::function<void(const detail::Node&)> backward);
  static Tensor from_op(Matrix value, std::span<const Tensor> inputs,
                        std::function<void(const detail::Node&)> backward);
  detail::Node* node() const { return node_.get(); }

 private:
  std::shared_ptr<detail::Node> node_;
};

/// While alive on this thread, operations record no tape (inference and
/// finite-difference probes).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

  static bool active();

 private:
  bool previous_;
};

namespace ops {

Tensor matmul(const Tensor& a, const Tensor& b);
/// a * b^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
/// Adds a 1 x n row to every row of a.
Tensor add_row(const Tensor& a, const Tensor& row);
/// Multiplies row i of a (k x n) by gates(i); gates is k x 1 or 1 x k.
Tensor scale_rows(const Tensor& a, const Tensor& gates);

Tensor gelu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);

Tensor softmax_rows(const Tensor& a);
/// Per-row layer normalization with affine gamma/beta (each 1 x n).
Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);
/// Divides each row by its L2 norm; throws NumericError on a zero row.
Tensor normalize_rows(const Tensor& a);

Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& a, Eigen::Index start, Eigen::Index count);
Tensor slice_cols(const Tensor& a, Eigen::Index start, Eigen::Index count);
/// Row-major reshape.
Tensor reshape(const Tensor& a, Eigen::Index rows, Eigen::Index cols);

/// Mean of each row -> k x 1.
Tensor mean_cols(const Tensor& a);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Mean binary cross-entropy of predictions against a fixed 0/1 target;
/// predictions are clamped to [eps, 1 - eps] (zero gradient where clamped).
Tensor bce_mean(const Tensor& pred, const Matrix& target, double eps);

}  // namespace ops
}  // namespace mvfsad
