// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "mvfsad/errors.hpp"
#include "mvfsad/gradcheck.hpp"
#include "mvfsad/optimizer.hpp"
#include "mvfsad/toy_data.hpp"
#include "mvfsad/trainer.hpp"
#include "test_support.hpp"

using namespace mvfsad;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

TrainingShot toy_shot(int size, std::uint64_t seed) {
  ToySample s = make_toy_object(size, seed);
  return {std::move(s.image), std::move(s.cloud)};
}

}  // namespace

TEST_CASE("train config validation and learning rates") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.learning_rate("class_text_adapter") == 1e-5);
  CHECK(c.learning_rate("seg_text_adapter") == 5e-5);
  CHECK(c.learning_rate("image_adapter") == 5e-4);
  CHECK(c.learning_rate("decoder") == 5e-4);
  CHECK(c.learning_rate("fusion") == 1e-4);
  CHECK_THROWS_AS(c.learning_rate("encoder"), InvalidArgument);
  c.shots = 3;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = TrainConfig{};
  c.lr_decoder = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = TrainConfig{};
  c.mask_retries = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("adam moves a quadratic towards its minimum") {
  Tensor w = Tensor::parameter(Matrix::Constant(1, 3, 5.0));
  Adam adam({{"w", 0.1, {{"w", w}}}});
  for (int i = 0; i < 300; ++i) {
    adam.zero_grad();
    ops::sum(ops::mul(w, w)).backward();
    adam.step();
  }
  CHECK(adam.steps() == 300);
  CHECK(w.value().cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("first adam step moves each entry by the learning rate") {
  Tensor w = Tensor::parameter(Matrix::Constant(1, 2, 1.0));
  Adam adam({{"w", 0.01, {{"w", w}}}});
  Matrix g(1, 2);
  g << 3.0, -0.5;
  ops::sum(ops::mul(w, Tensor::constant(g))).backward();
  adam.step();
  CHECK(w.value()(0, 0) == doctest::Approx(0.99).epsilon(1e-9));
  CHECK(w.value()(0, 1) == doctest::Approx(1.01).epsilon(1e-9));
}

TEST_CASE("parameters without gradient stay put") {
  Tensor w = Tensor::parameter(Matrix::Constant(2, 2, 0.7));
  Adam adam({{"w", 0.5, {{"w", w}}}});
  adam.step();
  adam.step();
  CHECK(w.value() == Matrix::Constant(2, 2, 0.7));
}

TEST_CASE("synthesized training pairs are deterministic and respect the foreground") {
  const ModelConfig mc = testing::small_model_config();
  const FrozenBackbone backbone(mc);
  TrainableHead head(mc, 1, true);
  TrainConfig tc;
  const Trainer trainer(backbone, head, tc);
  const TrainingShot shot = toy_shot(32, 5);
  const AnomalySample a = trainer.synthesize(shot, 3, 1);
  const AnomalySample b = trainer.synthesize(shot, 3, 1);
  CHECK(a.x_minus == b.x_minus);
  CHECK(a.mask == b.mask);
  const AnomalySample c = trainer.synthesize(shot, 4, 1);
  CHECK(c.seed != a.seed);
  for (std::size_t p = 0; p < a.mask.size(); ++p) {
    if (a.mask.values[p]) CHECK(shot.cloud.valid[p]);
  }
}

TEST_CASE("loss decreases on a fixed pair and the encoder stays frozen") {
  const ModelConfig mc = testing::small_model_config();
  const FrozenBackbone backbone(mc);
  TrainableHead head(mc, 2, true);
  TrainConfig tc;
  Trainer trainer(backbone, head, tc);
  const TrainingShot shot = toy_shot(32, 6);
  const AnomalySample s = trainer.synthesize(shot, 0, 0);
  REQUIRE_FALSE(s.empty_mask);
  const FrozenFeatures pos = backbone.extract(s.x_plus, shot.cloud);
  const FrozenFeatures neg = backbone.extract(s.x_minus, shot.cloud);
  const auto frozen = checksum(backbone.parameters());

  const LossBreakdown before = trainer.evaluate_loss(pos, neg, s.mask);
  std::vector<double> losses;
  for (int i = 0; i < 50; ++i) {
    const LossBreakdown l = trainer.step(pos, neg, s.mask);
    if (i == 0) CHECK(l.l_tot == before.l_tot);
    CHECK(l.l_tot == doctest::Approx(l.l_con + l.l_seg).epsilon(1e-12));
    CHECK(l.l_con == doctest::Approx(0.5 * (l.l_i2t + l.l_t2i)).epsilon(1e-12));
    losses.push_back(l.l_tot);
  }
  CHECK(losses.back() < losses.front());
  CHECK(median({losses.begin() + 39, losses.end()}) < median({losses.begin(), losses.begin() + 10}));
  CHECK(checksum(backbone.parameters()) == frozen);
  CHECK(trainer.optimizer().steps() == 50);
}

TEST_CASE("fit runs one step per shot per epoch and is reproducible") {
  const ModelConfig mc = testing::small_model_config();
  const FrozenBackbone backbone(mc);
  const std::vector<TrainingShot> shots{toy_shot(32, 10), toy_shot(32, 11)};
  TrainConfig tc;
  tc.epochs = 2;
  tc.seed = 9;

  const auto run = [&] {
    TrainableHead head(mc, head_seed(tc), true);
    Trainer trainer(backbone, head, tc);
    int seen = 0;
    const auto records = trainer.fit(shots, [&](const StepRecord&) { ++seen; });
    CHECK(seen == 4);
    return std::make_pair(records, checksum(head.parameters()));
  };
  const auto [r1, c1] = run();
  const auto [r2, c2] = run();
  REQUIRE(r1.size() == 4);
  CHECK(r1[3].epoch == 1);
  CHECK(r1[3].shot == 1);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].loss.l_tot == r2[i].loss.l_tot);
    CHECK(r1[i].mask_fraction > 0.0);
  }
  CHECK(c1 == c2);
}

TEST_CASE("pipeline gradient check at a small configuration") {
  GradCheckOptions opt;
  opt.dim = 8;
  opt.grid_side = 2;
  opt.views = 2;
  const GradCheckResult r = grad_check_pipeline(opt);
  CHECK(r.entries_checked > 0);
  CHECK(r.max_rel_error <= 1e-4);
}
