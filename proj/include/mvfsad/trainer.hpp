// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Few-shot training: each step pairs a cached normal shot with a freshly
// synthesized anomalous copy and takes one Adam update on the trainable head.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mvfsad/anomaly_synth.hpp"
#include "mvfsad/losses.hpp"
#include "mvfsad/model.hpp"
#include "mvfsad/optimizer.hpp"

namespace mvfsad {

struct TrainConfig {
  int shots = 2;
  int epochs = 200;
  std::uint64_t seed = 0;
  double lr_class_text_adapter = 1e-5;
  double lr_seg_text_adapter = 5e-5;
  double lr_image_adapter = 5e-4;
  double lr_decoder = 5e-4;
  double lr_fusion = 1e-4;
  AdamConfig adam;
  int perlin_min_log2 = 1;
  int perlin_max_log2 = 3;
  double perlin_threshold = 0.5;
  int mask_retries = 8;  // redraws when the synthetic mask comes out empty

  void validate() const;
  double learning_rate(const std::string& group) const;
};

/// Seed of the trainable head's initialization for a training run.
std::uint64_t head_seed(const TrainConfig& config);

struct TrainingShot {
  Image image;
  PointCloudGrid cloud;
};

struct StepRecord {
  int epoch = 0;
  int shot = 0;
  LossBreakdown loss;
  double mask_fraction = 0.0;
};

class Trainer {
 public:
  /// `anomaly_sources` replaces the procedural noise texture when non-empty.
  Trainer(const FrozenBackbone& backbone, TrainableHead& head, const TrainConfig& config,
          std::vector<Image> anomaly_sources = {});

  /// One forward of x+ and x-, loss, backward and Adam update.
  LossBreakdown step(const FrozenFeatures& normal, const FrozenFeatures& anomalous, const Mask& mask);

  /// Evaluates the loss without updating anything.
  LossBreakdown evaluate_loss(const FrozenFeatures& normal, const FrozenFeatures& anomalous, const Mask& mask) const;

  /// The synthetic anomaly used at (epoch, shot); deterministic in the seed.
  AnomalySample synthesize(const TrainingShot& shot, int epoch, int shot_index) const;

  std::vector<StepRecord> fit(const std::vector<TrainingShot>& shots,
                              const std::function<void(const StepRecord&)>& progress = {});

  const Adam& optimizer() const { return adam_; }

 private:
  struct Graph {
    ContrastiveTerms con;
    Tensor seg;
    Tensor total;
  };
  Graph build(const FrozenFeatures& normal, const FrozenFeatures& anomalous, const Mask& mask) const;

  const FrozenBackbone& backbone_;
  TrainableHead& head_;
  TrainConfig config_;
  std::vector<Image> sources_;
  Adam adam_;
};

}  // namespace mvfsad
