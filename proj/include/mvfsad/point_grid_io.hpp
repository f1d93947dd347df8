// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary point-grid files:
//
//   offset 0   4 bytes  magic "PGRD"
//   offset 4   u32 LE   height
//   offset 8   u32 LE   width
//   offset 12  H*W*3    f32 LE, (x, y, z) per pixel in row-major order
//
// A point with z == 0 or any non-finite coordinate is invalid.

#pragma once

#include <string>

#include "mvfsad/geometry.hpp"

namespace mvfsad {

PointCloudGrid read_point_grid(const std::string& path);
void write_point_grid(const std::string& path, const PointCloudGrid& grid);

/// Nearest-neighbour resampling that falls back to the closest valid source
/// pixel within the sampling footprint, so object borders do not erode.
PointCloudGrid resize_nearest_valid(const PointCloudGrid& grid, int out_h, int out_w);

}  // namespace mvfsad
