// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/tensor.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <unordered_set>

#include "mvfsad/errors.hpp"

namespace mvfsad {

using detail::Node;

void Node::accumulate(const Matrix& g) {
  if (!requires_grad) return;
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

namespace {
thread_local bool g_no_grad = false;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_no_grad) { g_no_grad = true; }
NoGradGuard::~NoGradGuard() { g_no_grad = previous_; }
bool NoGradGuard::active() { return g_no_grad; }

Tensor Tensor::constant(Matrix value) {
  Tensor t;
  t.node_ = std::make_shared<Node>();
  t.node_->value = std::move(value);
  return t;
}

Tensor Tensor::parameter(Matrix value) {
  Tensor t = constant(std::move(value));
  t.node_->requires_grad = true;
  return t;
}

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) throw InvalidArgument("Tensor::item on non-scalar");
  return node_->value(0, 0);
}

Tensor Tensor::from_op(Matrix value, std::initializer_list<const Tensor*> inputs,
                       std::function<void(const Node&)> backward) {
  Tensor t = constant(std::move(value));
  if (g_no_grad) return t;
  for (const Tensor* in : inputs) {
    if (in->requires_grad()) t.node_->requires_grad = true;
  }
  if (t.node_->requires_grad) {
    for (const Tensor* in : inputs) t.node_->parents.push_back(in->node_);
    t.node_->backward = std::move(backward);
  }
  return t;
}

Tensor Tensor::from_op(Matrix value, std::span<const Tensor> inputs,
                       std::function<void(const Node&)> backward) {
  Tensor t = constant(std::move(value));
  if (g_no_grad) return t;
  for (const Tensor& in : inputs) {
    if (in.requires_grad()) t.node_->requires_grad = true;
  }
  if (t.node_->requires_grad) {
    for (const Tensor& in : inputs) t.node_->parents.push_back(in.node_);
    t.node_->backward = std::move(backward);
  }
  return t;
}

void Tensor::backward() const {
  if (rows() != 1 || cols() != 1) throw InvalidArgument("backward() requires a 1x1 tensor");
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  node_->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && n->grad.size() != 0) n->backward(*n);
  }
}

namespace ops {
namespace {

Node* node_of(const Tensor& t) { return t.node(); }

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()) + ")");
  }
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matmul: inner dimensions differ");
  Matrix out;
  out.noalias() = a.value() * b.value();
  Node* pa = node_of(a);
  Node* pb = node_of(b);
  return Tensor::from_op(std::move(out), {&a, &b}, [pa, pb](const Node& self) {
    if (pa->requires_grad) pa->accumulate(self.grad * pb->value.transpose());
    if (pb->requires_grad) pb->accumulate(pa->value.transpose() * self.grad);
  });
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) throw InvalidArgument("matmul_nt: inner dimensions differ");
  Matrix out;
  out.noalias() = a.value() * b.value().transpose();
  Node* pa = node_of(a);
  Node* pb = node_of(b);
  return Tensor::from_op(std::move(out), {&a, &b}, [pa, pb](const Node& self) {
    if (pa->requires_grad) pa->accumulate(self.grad * pb->value);
    if (pb->requires_grad) pb->accumulate(self.grad.transpose() * pa->value);
  });
}

Tensor transpose(const Tensor& a) {
  Matrix out = a.value().transpose();
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a},
                         [pa](const Node& self) { pa->accumulate(self.grad.transpose()); });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Matrix out = a.value() + b.value();
  Node* pa = node_of(a);
  Node* pb = node_of(b);
  return Tensor::from_op(std::move(out), {&a, &b}, [pa, pb](const Node& self) {
    pa->accumulate(self.grad);
    pb->accumulate(self.grad);
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Matrix out = a.value() - b.value();
  Node* pa = node_of(a);
  Node* pb = node_of(b);
  return Tensor::from_op(std::move(out), {&a, &b}, [pa, pb](const Node& self) {
    pa->accumulate(self.grad);
    if (pb->requires_grad) pb->accumulate(-self.grad);
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Matrix out = a.value().cwiseProduct(b.value());
  Node* pa = node_of(a);
  Node* pb = node_of(b);
  return Tensor::from_op(std::move(out), {&a, &b}, [pa, pb](const Node& self) {
    if (pa->requires_grad) pa->accumulate(self.grad.cwiseProduct(pb->value));
    if (pb->requires_grad) pb->accumulate(self.grad.cwiseProduct(pa->value));
  });
}

Tensor scale(const Tensor& a, double s) {
  Matrix out = a.value() * s;
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa, s](const Node& self) { pa->accumulate(self.grad * s); });
}

Tensor add_scalar(const Tensor& a, double s) {
  Matrix out = a.value().array() + s;
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa](const Node& self) { pa->accumulate(self.grad); });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw InvalidArgument("add_row: row must be 1 x cols(a)");
  Matrix out = a.value().rowwise() + row.value().row(0);
  Node* pa = node_of(a);
  Node* pr = node_of(row);
  return Tensor::from_op(std::move(out), {&a, &row}, [pa, pr](const Node& self) {
    pa->accumulate(self.grad);
    if (pr->requires_grad) pr->accumulate(self.grad.colwise().sum());
  });
}

Tensor scale_rows(const Tensor& a, const Tensor& gates) {
  const bool column = gates.cols() == 1 && gates.rows() == a.rows();
  const bool row = gates.rows() == 1 && gates.cols() == a.rows();
  if (!column && !row) throw InvalidArgument("scale_rows: gate count must equal row count");
  const Eigen::Map<const Eigen::VectorXd> g(gates.value().data(), a.rows());
  Matrix out = g.asDiagonal() * a.value();
  Node* pa = node_of(a);
  Node* pg = node_of(gates);
  return Tensor::from_op(std::move(out), {&a, &gates}, [pa, pg, column](const Node& self) {
    const Eigen::Index k = pa->value.rows();
    if (pa->requires_grad) {
      const Eigen::Map<const Eigen::VectorXd> gv(pg->value.data(), k);
      pa->accumulate(gv.asDiagonal() * self.grad);
    }
    if (pg->requires_grad) {
      Eigen::VectorXd dg = self.grad.cwiseProduct(pa->value).rowwise().sum();
      if (column) {
        pg->accumulate(Matrix(dg));
      } else {
        pg->accumulate(Matrix(dg.transpose()));
      }
    }
  });
}

Tensor gelu(const Tensor& a) {
  const auto x = a.value().array();
  Matrix out = (0.5 * x * (1.0 + (kGeluC * (x + kGeluA * x.cube())).tanh())).matrix();
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa](const Node& self) {
    const auto x = pa->value.array();
    const Eigen::ArrayXXd t = (kGeluC * (x + kGeluA * x.cube())).tanh();
    const Eigen::ArrayXXd dt = kGeluC * (1.0 + 3.0 * kGeluA * x.square());
    const Eigen::ArrayXXd d = 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t.square()) * dt;
    pa->accumulate((self.grad.array() * d).matrix());
  });
}

Tensor sigmoid(const Tensor& a) {
  Matrix out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa](const Node& self) {
    const auto y = self.value.array();
    pa->accumulate((self.grad.array() * y * (1.0 - y)).matrix());
  });
}

Tensor exp(const Tensor& a) {
  Matrix out = a.value().array().exp().matrix();
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa](const Node& self) {
    pa->accumulate(self.grad.cwiseProduct(self.value));
  });
}

Tensor log(const Tensor& a) {
  Matrix out = a.value().array().log().matrix();
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa](const Node& self) {
    pa->accumulate((self.grad.array() / pa->value.array()).matrix());
  });
}

Tensor softmax_rows(const Tensor& a) {
  Matrix out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa](const Node& self) {
    const Matrix& y = self.value;
    const Eigen::VectorXd dots = self.grad.cwiseProduct(y).rowwise().sum();
    Matrix g = self.grad;
    g.colwise() -= dots;
    pa->accumulate(g.cwiseProduct(y));
  });
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const Eigen::Index n = x.cols();
  if (gamma.rows() != 1 || gamma.cols() != n || beta.rows() != 1 || beta.cols() != n) {
    throw InvalidArgument("layer_norm_rows: gamma/beta must be 1 x cols(x)");
  }
  const Matrix& xv = x.value();
  const Eigen::VectorXd mu = xv.rowwise().mean();
  Matrix centered = xv.colwise() - mu;
  const Eigen::VectorXd inv_sigma =
      ((centered.array().square().rowwise().sum() / static_cast<double>(n)) + eps).rsqrt().matrix();
  Matrix xhat = inv_sigma.asDiagonal() * centered;
  Matrix out = (xhat.array().rowwise() * gamma.value().row(0).array()).matrix();
  out.rowwise() += beta.value().row(0);
  Node* px = node_of(x);
  Node* pg = node_of(gamma);
  Node* pb = node_of(beta);
  return Tensor::from_op(
      std::move(out), {&x, &gamma, &beta},
      [px, pg, pb, xhat = std::move(xhat), inv_sigma, n](const Node& self) {
        if (pg->requires_grad) pg->accumulate(self.grad.cwiseProduct(xhat).colwise().sum());
        if (pb->requires_grad) pb->accumulate(self.grad.colwise().sum());
        if (px->requires_grad) {
          Matrix dxhat = (self.grad.array().rowwise() * pg->value.row(0).array()).matrix();
          const Eigen::VectorXd m1 = dxhat.rowwise().mean();
          const Eigen::VectorXd m2 = dxhat.cwiseProduct(xhat).rowwise().sum() / static_cast<double>(n);
          Matrix dx = dxhat;
          dx.colwise() -= m1;
          dx -= m2.asDiagonal() * xhat;
          px->accumulate(inv_sigma.asDiagonal() * dx);
        }
      });
}

Tensor normalize_rows(const Tensor& a) {
  const Eigen::VectorXd norms = a.value().rowwise().norm();
  for (Eigen::Index r = 0; r < norms.size(); ++r) {
    if (!(norms(r) > 0.0) || !std::isfinite(norms(r))) {
      throw NumericError("normalize_rows: row " + std::to_string(r) + " has zero or non-finite norm");
    }
  }
  const Eigen::VectorXd inv = norms.cwiseInverse();
  Matrix out = inv.asDiagonal() * a.value();
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa, inv](const Node& self) {
    const Matrix& y = self.value;
    const Eigen::VectorXd dots = self.grad.cwiseProduct(y).rowwise().sum();
    Matrix g = self.grad - dots.asDiagonal() * y;
    pa->accumulate(inv.asDiagonal() * g);
  });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw InvalidArgument("concat_cols: no inputs");
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != rows) throw InvalidArgument("concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<Node*> nodes;
  Eigen::Index offset = 0;
  for (const Tensor& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
    nodes.push_back(node_of(p));
  }
  return Tensor::from_op(std::move(out), parts, [nodes](const Node& self) {
    Eigen::Index off = 0;
    for (Node* n : nodes) {
      const Eigen::Index c = n->value.cols();
      if (n->requires_grad) n->accumulate(self.grad.middleCols(off, c));
      off += c;
    }
  });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw InvalidArgument("concat_rows: no inputs");
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  for (const Tensor& p : parts) {
    if (p.cols() != cols) throw InvalidArgument("concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<Node*> nodes;
  Eigen::Index offset = 0;
  for (const Tensor& p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    offset += p.rows();
    nodes.push_back(node_of(p));
  }
  return Tensor::from_op(std::move(out), parts, [nodes](const Node& self) {
    Eigen::Index off = 0;
    for (Node* n : nodes) {
      const Eigen::Index r = n->value.rows();
      if (n->requires_grad) n->accumulate(self.grad.middleRows(off, r));
      off += r;
    }
  });
}

Tensor slice_rows(const Tensor& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) throw InvalidArgument("slice_rows: out of range");
  Matrix out = a.value().middleRows(start, count);
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa, start, count](const Node& self) {
    Matrix g = Matrix::Zero(pa->value.rows(), pa->value.cols());
    g.middleRows(start, count) = self.grad;
    pa->accumulate(g);
  });
}

Tensor slice_cols(const Tensor& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw InvalidArgument("slice_cols: out of range");
  Matrix out = a.value().middleCols(start, count);
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa, start, count](const Node& self) {
    Matrix g = Matrix::Zero(pa->value.rows(), pa->value.cols());
    g.middleCols(start, count) = self.grad;
    pa->accumulate(g);
  });
}

Tensor reshape(const Tensor& a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.value().size()) throw InvalidArgument("reshape: element count differs");
  Matrix out = Eigen::Map<const Matrix>(a.value().data(), rows, cols);
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa](const Node& self) {
    pa->accumulate(Eigen::Map<const Matrix>(self.grad.data(), pa->value.rows(), pa->value.cols()));
  });
}

Tensor mean_cols(const Tensor& a) {
  const double n = static_cast<double>(a.cols());
  Matrix out = a.value().rowwise().mean();
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa, n](const Node& self) {
    Matrix g(pa->value.rows(), pa->value.cols());
    g.colwise() = self.grad.col(0) / n;
    pa->accumulate(g);
  });
}

Tensor sum(const Tensor& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  Node* pa = node_of(a);
  return Tensor::from_op(std::move(out), {&a}, [pa](const Node& self) {
    pa->accumulate(Matrix::Constant(pa->value.rows(), pa->value.cols(), self.grad(0, 0)));
  });
}

Tensor mean(const Tensor& a) {
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Tensor bce_mean(const Tensor& pred, const Matrix& target, double eps) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw InvalidArgument("bce_mean: prediction and target shapes differ");
  }
  const auto p = pred.value().array().max(eps).min(1.0 - eps);
  const auto t = target.array();
  const double n = static_cast<double>(target.size());
  Matrix out(1, 1);
  out(0, 0) = -(t * p.log() + (1.0 - t) * (1.0 - p).log()).sum() / n;
  Node* pp = node_of(pred);
  return Tensor::from_op(std::move(out), {&pred}, [pp, target, eps, n](const Node& self) {
    const auto raw = pp->value.array();
    const Eigen::ArrayXXd p = raw.max(eps).min(1.0 - eps);
    const auto t = target.array();
    const Eigen::ArrayXXd inside = ((raw > eps) && (raw < 1.0 - eps)).cast<double>();
    const Eigen::ArrayXXd d = -(t / p - (1.0 - t) / (1.0 - p)) * inside * (self.grad(0, 0) / n);
    pp->accumulate(d.matrix());
  });
}

}  // namespace ops
}  // namespace mvfsad
