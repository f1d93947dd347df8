// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "mvfsad/errors.hpp"

namespace mvfsad {

double cosine_similarity(const Matrix& a, const Matrix& b) {
  if (a.rows() != 1 || b.rows() != 1 || a.cols() != b.cols()) {
    throw InvalidArgument("cosine_similarity: expects two 1 x n rows");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw NumericError("cosine_similarity: zero-norm embedding");
  return a.row(0).dot(b.row(0)) / (na * nb);
}

ScorePair classification_score(const Matrix& image_embedding, const Matrix& text_normal,
                               const Matrix& text_anomalous, const ScalarMap& map, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("classification_score: tau must be positive");
  if (map.values.empty()) throw InvalidArgument("classification_score: empty anomaly map");
  const double sim_plus = cosine_similarity(image_embedding, text_normal) / tau;
  const double sim_minus = cosine_similarity(image_embedding, text_anomalous) / tau;
  const double top = std::max(sim_plus, sim_minus);
  const double e_plus = std::exp(sim_plus - top);
  const double e_minus = std::exp(sim_minus - top);
  ScorePair out;
  out.s_plus = e_plus / (e_plus + e_minus);
  out.s_minus = e_minus / (e_plus + e_minus);
  out.a_score = out.s_minus / (out.s_minus + out.s_plus) + *std::max_element(map.values.begin(), map.values.end());
  return out;
}

}  // namespace mvfsad
