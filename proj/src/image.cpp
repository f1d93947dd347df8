// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvfsad {
namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

// Corner-aligned source coordinate for each output index.
std::vector<Tap> corner_aligned_taps(int in, int out) {
  std::vector<Tap> taps(static_cast<std::size_t>(out));
  for (int i = 0; i < out; ++i) {
    const double pos = (out == 1 || in == 1) ? 0.0 : static_cast<double>(i) * (in - 1) / (out - 1);
    const int lo = std::min(static_cast<int>(std::floor(pos)), in - 1);
    const int hi = std::min(lo + 1, in - 1);
    taps[static_cast<std::size_t>(i)] = {lo, hi, pos - lo};
  }
  return taps;
}

}  // namespace

Image resize_bilinear(const Image& src, int out_h, int out_w) {
  if (src.height <= 0 || src.width <= 0 || out_h <= 0 || out_w <= 0) {
    throw InvalidArgument("resize_bilinear: empty image or target");
  }
  if (src.height == out_h && src.width == out_w) return src;
  const auto ty = corner_aligned_taps(src.height, out_h);
  const auto tx = corner_aligned_taps(src.width, out_w);
  Image out(out_h, out_w);
  for (int r = 0; r < out_h; ++r) {
    const Tap& y = ty[static_cast<std::size_t>(r)];
    for (int c = 0; c < out_w; ++c) {
      const Tap& x = tx[static_cast<std::size_t>(c)];
      for (int ch = 0; ch < 3; ++ch) {
        const double top = (1 - x.frac) * src.at(y.lo, x.lo, ch) + x.frac * src.at(y.lo, x.hi, ch);
        const double bot = (1 - x.frac) * src.at(y.hi, x.lo, ch) + x.frac * src.at(y.hi, x.hi, ch);
        out.at(r, c, ch) = (1 - y.frac) * top + y.frac * bot;
      }
    }
  }
  return out;
}

ScalarMap resize_bilinear(const ScalarMap& src, int out_h, int out_w) {
  if (src.height <= 0 || src.width <= 0 || out_h <= 0 || out_w <= 0) {
    throw InvalidArgument("resize_bilinear: empty map or target");
  }
  if (src.height == out_h && src.width == out_w) return src;
  const auto ty = corner_aligned_taps(src.height, out_h);
  const auto tx = corner_aligned_taps(src.width, out_w);
  ScalarMap out(out_h, out_w);
  for (int r = 0; r < out_h; ++r) {
    const Tap& y = ty[static_cast<std::size_t>(r)];
    for (int c = 0; c < out_w; ++c) {
      const Tap& x = tx[static_cast<std::size_t>(c)];
      const double top = (1 - x.frac) * src(y.lo, x.lo) + x.frac * src(y.lo, x.hi);
      const double bot = (1 - x.frac) * src(y.hi, x.lo) + x.frac * src(y.hi, x.hi);
      out(r, c) = (1 - y.frac) * top + y.frac * bot;
    }
  }
  return out;
}

Mask resize_nearest(const Mask& src, int out_h, int out_w) {
  if (src.height <= 0 || src.width <= 0 || out_h <= 0 || out_w <= 0) {
    throw InvalidArgument("resize_nearest: empty mask or target");
  }
  if (src.height == out_h && src.width == out_w) return src;
  Mask out(out_h, out_w);
  for (int r = 0; r < out_h; ++r) {
    const int sr = std::min(src.height - 1, static_cast<int>((r + 0.5) * src.height / out_h));
    for (int c = 0; c < out_w; ++c) {
      const int sc = std::min(src.width - 1, static_cast<int>((c + 0.5) * src.width / out_w));
      out(r, c) = src(sr, sc);
    }
  }
  return out;
}

void require_unit_range(const Image& image, const char* what) {
  for (const double v : image.data) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvalidArgument(std::string(what) + ": channel values must lie in [0, 1]");
    }
  }
}

}  // namespace mvfsad
