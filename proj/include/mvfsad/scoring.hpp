// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mvfsad/image.hpp"
#include "mvfsad/tensor.hpp"

namespace mvfsad {

struct ScorePair {
  double s_plus = 0.5;
  double s_minus = 0.5;
  double a_score = 0.5;
};

/// Cosine similarity of two 1 x n rows; throws NumericError on a zero row.
double cosine_similarity(const Matrix& a, const Matrix& b);

/// Temperature-tau two-way softmax over the image/text cosine similarities,
/// then A = S- / (S- + S+) + max(map).
ScorePair classification_score(const Matrix& image_embedding, const Matrix& text_normal,
                               const Matrix& text_anomalous, const ScalarMap& map, double tau = 0.07);

}  // namespace mvfsad
