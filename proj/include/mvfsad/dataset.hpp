// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk layout, mirroring MVTec-3D AD with point grids in place of TIFFs:
//
//   <root>/<class>/train/good/{rgb/NAME.png, xyz/NAME.pgrd}
//   <root>/<class>/test/<defect>/{rgb/NAME.png, xyz/NAME.pgrd, gt/NAME.png}
//
// RGB may also be .ppm and masks .pgm. The default root comes from the
// MVFSAD_DATA_ROOT environment variable.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvfsad/geometry.hpp"
#include "mvfsad/image.hpp"

namespace mvfsad {

struct DatasetSample {
  std::string rgb_path;
  std::string grid_path;
  std::optional<std::string> mask_path;
  std::string class_name;
  std::string split;   // "train" or "test"
  std::string defect;  // "good" for normal samples
  std::string name;

  int label() const { return defect == "good" ? 0 : 1; }
};

struct LoadedSample {
  Image image;
  PointCloudGrid cloud;
  std::optional<Mask> mask;
};

/// Image scaled to [0, 1] and resized (bilinear) to size x size, point grid
/// resized with nearest-valid sampling, mask resized and binarized at 0.5.
LoadedSample load_sample(const DatasetSample& sample, int size = 240);

/// Samples of one class and split, sorted by defect then name.
std::vector<DatasetSample> list_samples(const std::string& root, const std::string& class_name,
                                        const std::string& split);

/// $MVFSAD_DATA_ROOT, or "data" when unset.
std::string default_data_root();

/// Writes one sample into the layout above (PNG images, .pgrd grids).
void write_sample(const std::string& root, const std::string& class_name, const std::string& split,
                  const std::string& defect, const std::string& name, const Image& image,
                  const PointCloudGrid& cloud, const std::optional<Mask>& mask);

}  // namespace mvfsad
