// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvfsad/errors.hpp"

namespace mvfsad {

/// Single-channel H x W grid stored row-major.
template <typename T>
struct Plane {
  int height = 0;
  int width = 0;
  std::vector<T> values;

  Plane() = default;
  Plane(int h, int w, T fill = T{}) : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {
    if (h < 0 || w < 0) throw InvalidArgument("Plane: negative dimensions");
  }

  std::size_t size() const { return values.size(); }
  T& operator()(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
  const T& operator()(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
  bool same_shape(int h, int w) const { return height == h && width == w; }

  friend bool operator==(const Plane&, const Plane&) = default;
};

using Mask = Plane<std::uint8_t>;
using ScalarMap = Plane<double>;

/// RGB image with channel values in [0, 1], stored row-major HWC.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, fill) {
    if (h < 0 || w < 0) throw InvalidArgument("Image: negative dimensions");
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
  double& at(int row, int col, int channel) {
    return data[(static_cast<std::size_t>(row) * width + col) * 3 + channel];
  }
  double at(int row, int col, int channel) const {
    return data[(static_cast<std::size_t>(row) * width + col) * 3 + channel];
  }
  std::array<double, 3> pixel(int row, int col) const {
    const std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
    return {data[i], data[i + 1], data[i + 2]};
  }
  void set_pixel(int row, int col, const std::array<double, 3>& rgb) {
    const std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
    data[i] = rgb[0];
    data[i + 1] = rgb[1];
    data[i + 2] = rgb[2];
  }
  bool same_shape(const Image& other) const { return height == other.height && width == other.width; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Bilinear resize with corner-aligned sampling.
Image resize_bilinear(const Image& src, int out_h, int out_w);
ScalarMap resize_bilinear(const ScalarMap& src, int out_h, int out_w);

/// Nearest-neighbour resize, sampling at pixel centres.
Mask resize_nearest(const Mask& src, int out_h, int out_w);

/// Throws InvalidArgument unless every channel value is finite and in [0, 1].
void require_unit_range(const Image& image, const char* what);

}  // namespace mvfsad
