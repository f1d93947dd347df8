// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "mvfsad/errors.hpp"
#include "mvfsad/fusion.hpp"
#include "mvfsad/gradcheck.hpp"
#include "mvfsad/model.hpp"
#include "mvfsad/toy_data.hpp"
#include "test_support.hpp"

using namespace mvfsad;
using testing::random_matrix;

namespace {

std::vector<Tensor> views_of(Rng& r, int n, Eigen::Index rows, Eigen::Index cols) {
  std::vector<Tensor> out;
  for (int i = 0; i < n; ++i) out.push_back(Tensor::constant(random_matrix(r, rows, cols)));
  return out;
}

}  // namespace

TEST_CASE("global fusion gates and output shape") {
  Rng r(1);
  const GlobalFusion g(16, 5, 2, r);
  const auto views = views_of(r, 5, 1, 16);
  const Tensor gates = g.gates(views);
  CHECK(gates.rows() == 1);
  CHECK(gates.cols() == 5);
  CHECK(gates.value().minCoeff() > 0.0);
  CHECK(gates.value().maxCoeff() < 1.0);
  const Tensor out = g.forward(views);
  CHECK(out.rows() == 1);
  CHECK(out.cols() == 16);
  CHECK(out.value().allFinite());
  CHECK(g.forward(views).value() == out.value());

  auto changed = views;
  changed[2] = Tensor::constant(random_matrix(r, 1, 16));
  CHECK(g.forward(changed).value() != out.value());

  CHECK_THROWS_AS(g.forward(std::span(views).first(4)), InvalidArgument);
  auto bad = views;
  bad[0] = Tensor::constant(random_matrix(r, 1, 15));
  CHECK_THROWS_AS(g.forward(bad), InvalidArgument);
}

TEST_CASE("local fusion pools over views") {
  Rng r(2);
  FusionConfig cfg;
  cfg.blocks = 1;
  const LocalFusion l(16, 12, 3, cfg, r);
  const auto views = views_of(r, 3, 9, 16);
  const Tensor out = l.forward(views);
  CHECK(out.rows() == 9);
  CHECK(out.cols() == 12);

  // Mean pooling over views after joint attention: order of the views does not matter.
  const Tensor swapped[] = {views[2], views[0], views[1]};
  CHECK((l.forward(swapped).value() - out.value()).cwiseAbs().maxCoeff() < 1e-12);

  auto ragged = views;
  ragged[1] = Tensor::constant(random_matrix(r, 8, 16));
  CHECK_THROWS_AS(l.forward(ragged), InvalidArgument);
  CHECK_THROWS_AS(l.forward(std::span(views).first(2)), InvalidArgument);
}

TEST_CASE("enhance is an elementwise sum") {
  Rng r(3);
  const Matrix a = random_matrix(r, 4, 6);
  const Matrix b = random_matrix(r, 4, 6);
  CHECK(enhance(Tensor::constant(a), Tensor::constant(b)).value() == a + b);
  CHECK_THROWS_AS(enhance(Tensor::constant(a), Tensor::constant(random_matrix(r, 4, 5))), InvalidArgument);
}

TEST_CASE("fusion gradients match finite differences") {
  for (const char* c : {"global_fuse", "local_fuse"}) {
    const GradCheckResult res = grad_check(c);
    CHECK(res.entries_checked > 0);
    CHECK(res.max_rel_error <= 1e-4);
  }
}

TEST_CASE("head with fusion inactive matches a head without fusion") {
  ModelConfig cfg = testing::small_model_config();
  const ToySample obj = make_toy_object(cfg.encoder.image_size, 7);

  const FrozenBackbone mv(cfg);
  const TrainableHead fused(cfg, 11, true);
  CHECK(fused.fusion_active());
  const FrozenFeatures with_views = mv.extract(obj.image, obj.cloud);
  CHECK(with_views.views.size() == 3);
  const AdaptedText text = fused.adapt_text(mv.text_normal(), mv.text_anomalous());
  const HeadOutput out_mv = fused.forward(with_views, text.seg);

  cfg.use_multiview = false;
  const FrozenBackbone plain(cfg);
  const FrozenFeatures no_views = plain.extract(obj.image, obj.cloud);
  CHECK(no_views.views.empty());
  const TrainableHead inactive(cfg, 11, true);
  const TrainableHead absent(cfg, 11, false);
  CHECK_FALSE(inactive.fusion_active());
  CHECK(inactive.has_fusion());
  CHECK_FALSE(absent.has_fusion());

  const HeadOutput a = inactive.forward(no_views, inactive.adapt_text(plain.text_normal(), plain.text_anomalous()).seg);
  const HeadOutput b = absent.forward(no_views, absent.adapt_text(plain.text_normal(), plain.text_anomalous()).seg);
  CHECK(a.map.value() == b.map.value());
  CHECK(a.image_embedding.value() == b.image_embedding.value());
  // Shared modules are initialised identically whether or not fusion exists.
  CHECK(checksum(inactive.group_parameters("decoder")) == checksum(absent.group_parameters("decoder")));
  CHECK(absent.group_parameters("fusion").empty());
  // The fused output differs because the enhancement terms are added.
  CHECK(out_mv.map.value() != a.map.value());
}

TEST_CASE("head rejects a wrong number of views") {
  const ModelConfig cfg = testing::small_model_config();
  const FrozenBackbone backbone(cfg);
  const TrainableHead head(cfg, 3, true);
  const ToySample obj = make_toy_object(cfg.encoder.image_size, 8);
  FrozenFeatures f = backbone.extract(obj.image, obj.cloud);
  f.views.pop_back();
  const AdaptedText text = head.adapt_text(backbone.text_normal(), backbone.text_anomalous());
  CHECK_THROWS_AS(head.forward(f, text.seg), InvalidArgument);
}
