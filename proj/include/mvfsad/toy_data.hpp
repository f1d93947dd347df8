// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Procedural toy category: smooth height-field objects on an elliptical
// footprint, back-projected through a pinhole camera, with a shaded striped
// texture. Test anomalies are Perlin-masked blends drawn from seed streams
// that training never touches.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvfsad/geometry.hpp"
#include "mvfsad/image.hpp"

namespace mvfsad {

struct ToyConfig {
  int size = 240;
  int train_shots = 2;
  int test_normal = 20;
  int test_anomalous = 20;
  double beta_min = 0.15;  // opacity range of the original image inside test masks
  double beta_max = 0.5;
  int min_mask_area = 150;  // pixels
  std::uint64_t seed = 2026;

  void validate() const;
};

struct ToySample {
  std::string id;
  Image image;
  PointCloudGrid cloud;
  Mask mask;  // all zero for normal samples
  int label = 0;
};

struct ToyDataset {
  std::vector<ToySample> train;
  std::vector<ToySample> test;  // normal samples first
};

/// One normal object; deterministic in (size, seed).
ToySample make_toy_object(int size, std::uint64_t seed);

ToyDataset make_toy_dataset(const ToyConfig& config);

}  // namespace mvfsad
