// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// PNG (via libpng) and binary Netpbm (PPM/PGM) image files. The format is
// chosen from the file extension on write and from the magic bytes on read.

#pragma once

#include <string>

#include "mvfsad/image.hpp"

namespace mvfsad {

/// RGB image scaled to [0, 1]. Greyscale files are replicated to 3 channels.
Image read_image(const std::string& path);
/// 8-bit RGB; `.png` writes PNG, anything else binary PPM.
void write_image(const std::string& path, const Image& image);

/// Greyscale file binarized at half of full scale.
Mask read_mask(const std::string& path);
/// 8-bit greyscale, 0 or 255; `.png` writes PNG, anything else binary PGM.
void write_mask(const std::string& path, const Mask& mask);

/// Map with values in [0, 1] as 16-bit greyscale (PNG or PGM).
void write_map16(const std::string& path, const ScalarMap& map);
/// Reads a greyscale file (8 or 16 bit) scaled to [0, 1].
ScalarMap read_gray(const std::string& path);

}  // namespace mvfsad
