// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/losses.hpp"

#include "mvfsad/errors.hpp"

namespace mvfsad {

Tensor cosine(const Tensor& a, const Tensor& b) {
  if (a.rows() != 1 || b.rows() != 1 || a.cols() != b.cols()) throw InvalidArgument("cosine: expects two 1 x n rows");
  return ops::matmul_nt(ops::normalize_rows(a), ops::normalize_rows(b));
}

namespace {

// -log(exp(pos) / (exp(pos) + exp(neg)))
Tensor ratio_term(const Tensor& pos, const Tensor& neg) {
  return ops::sub(ops::log(ops::add(ops::exp(pos), ops::exp(neg))), pos);
}

}  // namespace

ContrastiveTerms contrastive_losses(const Tensor& image_normal, const Tensor& image_anomalous,
                                    const Tensor& text_normal, const Tensor& text_anomalous) {
  const Tensor s_pp = cosine(image_normal, text_normal);
  const Tensor s_pm = cosine(image_normal, text_anomalous);
  const Tensor s_mm = cosine(image_anomalous, text_anomalous);
  const Tensor s_mp = cosine(image_anomalous, text_normal);

  ContrastiveTerms out;
  out.i2t = ops::add(ratio_term(s_pp, s_pm), ratio_term(s_mm, s_mp));
  out.t2i = ops::add(ratio_term(s_pp, s_mp), ratio_term(s_mm, s_pm));
  out.con = ops::scale(ops::add(out.i2t, out.t2i), 0.5);
  return out;
}

Tensor seg_loss(const Tensor& map, const Mask& mask, double eps) {
  if (map.rows() != mask.height || map.cols() != mask.width) throw InvalidArgument("seg_loss: map/mask shape mismatch");
  Matrix target(mask.height, mask.width);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) target(r, c) = mask(r, c) ? 1.0 : 0.0;
  }
  return ops::bce_mean(map, target, eps);
}

Tensor total_loss(const Tensor& l_con, const Tensor& l_seg) { return ops::add(l_seg, l_con); }

}  // namespace mvfsad
