// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mvfsad/image.hpp"
#include "mvfsad/tensor.hpp"

namespace mvfsad {

struct LossBreakdown {
  double l_i2t = 0.0;
  double l_t2i = 0.0;
  double l_con = 0.0;
  double l_seg = 0.0;
  double l_tot = 0.0;
};

struct ContrastiveTerms {
  Tensor i2t;
  Tensor t2i;
  Tensor con;  // (i2t + t2i) / 2
};

/// Cosine similarity of two 1 x n rows as a 1 x 1 tensor.
Tensor cosine(const Tensor& a, const Tensor& b);

/// Bidirectional image/text contrastive loss over raw cosine similarities
/// (no temperature inside the exponentials).
ContrastiveTerms contrastive_losses(const Tensor& image_normal, const Tensor& image_anomalous,
                                    const Tensor& text_normal, const Tensor& text_anomalous);

constexpr double kBceClamp = 1e-7;

/// Mean binary cross-entropy of the anomaly map against the mask.
Tensor seg_loss(const Tensor& map, const Mask& mask, double eps = kBceClamp);

Tensor total_loss(const Tensor& l_con, const Tensor& l_seg);
inline double total_loss(double l_con, double l_seg) { return l_seg + l_con; }

}  // namespace mvfsad
