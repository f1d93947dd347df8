// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "mvfsad/errors.hpp"
#include "mvfsad/random.hpp"
#include "mvfsad/tensor.hpp"

using namespace mvfsad;

namespace {

Matrix randn(Rng& r, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * r.normal();
  return m;
}

// Max relative error between backward() and central differences of
// sum(f(inputs) .* W) for a fixed random W.
double op_grad_error(std::vector<Tensor> inputs, const std::function<Tensor(const std::vector<Tensor>&)>& f) {
  Rng r(99);
  const Tensor probe = f(inputs);
  const Tensor w = Tensor::constant(randn(r, probe.rows(), probe.cols()));
  const auto loss = [&] { return ops::sum(ops::mul(f(inputs), w)); };
  loss().backward();
  double worst = 0.0;
  const double eps = 1e-6;
  for (auto& in : inputs) {
    const Matrix g = in.grad().size() ? in.grad() : Matrix::Zero(in.rows(), in.cols());
    for (Eigen::Index i = 0; i < in.value().size(); ++i) {
      const double orig = in.value().data()[i];
      in.mutable_value().data()[i] = orig + eps;
      const double up = loss().item();
      in.mutable_value().data()[i] = orig - eps;
      const double down = loss().item();
      in.mutable_value().data()[i] = orig;
      const double n = (up - down) / (2 * eps);
      worst = std::max(worst, std::abs(n - g.data()[i]) / std::max({std::abs(n), std::abs(g.data()[i]), 1e-6}));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("each op's backward matches central differences") {
  Rng r(1);
  auto p = [&](Eigen::Index rows, Eigen::Index cols, double s = 1.0) { return Tensor::parameter(randn(r, rows, cols, s)); };
  using V = std::vector<Tensor>;
  CHECK(op_grad_error({p(3, 4), p(4, 2)}, [](const V& v) { return ops::matmul(v[0], v[1]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4), p(5, 4)}, [](const V& v) { return ops::matmul_nt(v[0], v[1]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4)}, [](const V& v) { return ops::transpose(v[0]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4), p(3, 4)}, [](const V& v) { return ops::sub(ops::add(v[0], v[1]), ops::mul(v[0], v[1])); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4)}, [](const V& v) { return ops::add_scalar(ops::scale(v[0], -2.5), 0.3); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4), p(1, 4)}, [](const V& v) { return ops::add_row(v[0], v[1]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4), p(3, 1)}, [](const V& v) { return ops::scale_rows(v[0], v[1]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4), p(1, 3)}, [](const V& v) { return ops::scale_rows(v[0], v[1]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4)}, [](const V& v) { return ops::gelu(v[0]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4)}, [](const V& v) { return ops::sigmoid(v[0]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4, 0.5)}, [](const V& v) { return ops::exp(v[0]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 4)}, [](const V& v) { return ops::log(ops::add_scalar(ops::exp(v[0]), 1.0)); }) < 1e-6);
  CHECK(op_grad_error({p(3, 5, 2.0)}, [](const V& v) { return ops::softmax_rows(v[0]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 6), p(1, 6), p(1, 6)},
                      [](const V& v) { return ops::layer_norm_rows(v[0], v[1], v[2]); }) < 1e-5);
  CHECK(op_grad_error({p(3, 4)}, [](const V& v) { return ops::normalize_rows(v[0]); }) < 1e-6);
  CHECK(op_grad_error({p(3, 2), p(3, 3)}, [](const V& v) { return ops::concat_cols(v); }) < 1e-6);
  CHECK(op_grad_error({p(2, 3), p(1, 3)}, [](const V& v) { return ops::concat_rows(v); }) < 1e-6);
  CHECK(op_grad_error({p(5, 4)}, [](const V& v) { return ops::slice_rows(v[0], 1, 3); }) < 1e-6);
  CHECK(op_grad_error({p(5, 4)}, [](const V& v) { return ops::slice_cols(v[0], 2, 2); }) < 1e-6);
  CHECK(op_grad_error({p(4, 6)}, [](const V& v) { return ops::reshape(v[0], 3, 8); }) < 1e-6);
  CHECK(op_grad_error({p(4, 6)}, [](const V& v) { return ops::mean_cols(v[0]); }) < 1e-6);
  CHECK(op_grad_error({p(4, 6)}, [](const V& v) { return ops::mean(v[0]); }) < 1e-6);
}

TEST_CASE("bce_mean matches the closed form and its gradient") {
  Matrix pred(1, 3);
  pred << 0.2, 0.7, 0.5;
  Matrix target(1, 3);
  target << 0.0, 1.0, 1.0;
  const Tensor t = Tensor::parameter(pred);
  const Tensor loss = ops::bce_mean(t, target, 1e-7);
  const double expected = -(std::log(0.8) + std::log(0.7) + std::log(0.5)) / 3.0;
  CHECK(loss.item() == doctest::Approx(expected).epsilon(1e-12));
  loss.backward();
  CHECK(t.grad()(0, 0) == doctest::Approx(1.0 / (3 * 0.8)).epsilon(1e-12));
  CHECK(t.grad()(0, 1) == doctest::Approx(-1.0 / (3 * 0.7)).epsilon(1e-12));
}

TEST_CASE("bce_mean has zero gradient where the prediction is clamped") {
  Matrix pred(1, 2);
  pred << 0.0, 1.0;
  Matrix target(1, 2);
  target << 1.0, 0.0;
  const Tensor t = Tensor::parameter(pred);
  const Tensor loss = ops::bce_mean(t, target, 1e-7);
  CHECK(loss.item() == doctest::Approx(-std::log(1e-7)).epsilon(1e-9));
  loss.backward();
  CHECK(t.grad().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradients accumulate across shared uses and constants record nothing") {
  const Tensor x = Tensor::parameter(Matrix::Constant(1, 1, 3.0));
  const Tensor y = ops::add(ops::mul(x, x), x);  // x^2 + x
  y.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(7.0));

  const Tensor c = Tensor::constant(Matrix::Constant(2, 2, 1.0));
  const Tensor d = ops::gelu(ops::matmul(c, c));
  CHECK_FALSE(d.requires_grad());
  CHECK(d.node()->parents.empty());
}

TEST_CASE("NoGradGuard suppresses the tape and restores on exit") {
  const Tensor x = Tensor::parameter(Matrix::Constant(1, 1, 2.0));
  {
    const NoGradGuard guard;
    CHECK(NoGradGuard::active());
    CHECK_FALSE(ops::scale(x, 2.0).requires_grad());
  }
  CHECK_FALSE(NoGradGuard::active());
  CHECK(ops::scale(x, 2.0).requires_grad());
}

TEST_CASE("softmax rows sum to one and normalize_rows rejects zero rows") {
  Rng r(5);
  const Tensor s = ops::softmax_rows(Tensor::constant(randn(r, 6, 4, 10.0)));
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(s.value().row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(ops::normalize_rows(Tensor::constant(Matrix::Zero(2, 3))), NumericError);
}

TEST_CASE("backward requires a scalar and shapes are checked") {
  const Tensor a = Tensor::parameter(Matrix::Ones(2, 2));
  CHECK_THROWS_AS(a.backward(), InvalidArgument);
  CHECK_THROWS_AS(ops::add(a, Tensor::constant(Matrix::Ones(2, 3))), InvalidArgument);
  CHECK_THROWS_AS(ops::matmul(a, Tensor::constant(Matrix::Ones(3, 3))), InvalidArgument);
}
