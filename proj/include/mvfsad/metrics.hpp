// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Image- and pixel-level anomaly detection metrics.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvfsad/image.hpp"

namespace mvfsad {

/// Mann-Whitney AUROC: P(score+ > score-) + P(tie) / 2.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Average precision: step-wise sum of precision over recall increments,
/// one step per distinct score.
double aupr(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// AUROC over all pixels pooled across maps.
double p_auroc(std::span<const ScalarMap> maps, std::span<const Mask> masks);

constexpr double kDefaultFprLimit = 0.3;

/// Area under the per-region-overlap curve up to `fpr_limit`, divided by it.
///
/// Each distinct map value t gives an operating point (FPR, PRO) for the
/// prediction map >= t; PRO averages the covered fraction over every
/// 8-connected ground-truth region of every mask. The curve is the best PRO
/// reachable within an FPR budget (a step function held between operating
/// points, zero before the first one).
double aupro(std::span<const ScalarMap> maps, std::span<const Mask> masks, double fpr_limit = kDefaultFprLimit);

/// 8-connected component labels (0 = background, 1..n in raster order of
/// first pixel). Returns the component count.
int label_components(const Mask& mask, Plane<int>& labels);

}  // namespace mvfsad
