// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Perlin-mask anomaly synthesis: a binarized noise field restricted to the
// depth foreground selects where a foreign texture is blended into the image.

#pragma once

#include <cstdint>

#include "mvfsad/geometry.hpp"
#include "mvfsad/image.hpp"
#include "mvfsad/random.hpp"

namespace mvfsad {

struct PerlinParams {
  int period_x = 4;  // lattice cells across the width (first octave)
  int period_y = 4;
  int octaves = 1;
  double persistence = 0.5;
  double threshold = 0.5;

  void validate() const;
};

struct AnomalySample {
  Image x_plus;
  Image x_minus;
  Mask mask;
  std::uint64_t seed = 0;
  double beta = 1.0;  // opacity of the original image inside the mask
  PerlinParams params;
  bool empty_mask = false;
  bool empty_foreground = false;
};

/// True exactly where depth > 0. Negative or non-finite depth is rejected.
Mask foreground_mask(const ScalarMap& depth);

/// Depth plane of a cloud: z where valid, 0 elsewhere.
ScalarMap depth_from_cloud(const PointCloudGrid& cloud);

/// Lattice-gradient Perlin noise summed over octaves and min-max normalized
/// to [0, 1]. A constant field comes back as all 0.5.
ScalarMap perlin_field(int h, int w, const PerlinParams& params, std::uint64_t seed);

/// mask = (perlin >= threshold) AND foreground; inside the mask
/// x_minus = beta * x_plus + (1 - beta) * source with beta ~ U[0.15, 1).
AnomalySample synthesize_anomaly(const Image& x_plus, const ScalarMap& depth, const Image& source_image,
                                 const PerlinParams& params, std::uint64_t seed);

/// Same as synthesize_anomaly but with a caller-chosen opacity.
AnomalySample synthesize_anomaly_with_beta(const Image& x_plus, const ScalarMap& depth, const Image& source_image,
                                           const PerlinParams& params, std::uint64_t seed, double beta);

/// Lattice periods drawn as powers of two in [2^min_log2, 2^max_log2].
PerlinParams draw_perlin_params(Rng& rng, int min_log2 = 1, int max_log2 = 3, double threshold = 0.5);

/// Seeded per-pixel colour noise, the default anomaly texture source.
Image procedural_noise_texture(int h, int w, std::uint64_t seed);

constexpr double kMinBlendOpacity = 0.15;

}  // namespace mvfsad
