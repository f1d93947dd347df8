// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Central finite-difference checks of the trainable components against the
// autodiff gradients, at a small probe size (D = C = 16, 16 patch tokens).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mvfsad {

struct GradCheckResult {
  std::string component;
  bool has_parameters = true;
  double max_rel_error = 0.0;
  std::size_t entries_checked = 0;
  std::string note;  // e.g. "no trainable parameters"
};

struct GradCheckOptions {
  double eps = 1e-5;
  int dim = 16;          // D = C
  int grid_side = 4;     // N_p = grid_side^2
  int views = 5;
  std::uint64_t seed = 1;
  double floor = 1e-5;   // denominator floor, scaled by max(1, |loss|)
};

/// Canonical ids: image_adapter, class_text_adapter, seg_text_adapter,
/// decoder, global_fuse, local_fuse, encoder.
std::vector<std::string> gradcheck_components();

/// Accepts the canonical ids and the short aliases A_f, A_cg, A_sg.
/// Throws InvalidArgument on an unknown id and NumericError if an analytic
/// gradient is not finite.
GradCheckResult grad_check(const std::string& component, const GradCheckOptions& options = {});

/// Same check for the whole head: both adapters, decoder, fusion, the anomaly
/// map and the training loss, at the probe size.
GradCheckResult grad_check_pipeline(const GradCheckOptions& options = {});

}  // namespace mvfsad
