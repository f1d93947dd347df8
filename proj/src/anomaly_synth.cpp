// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/anomaly_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mvfsad/errors.hpp"

namespace mvfsad {

void PerlinParams::validate() const {
  if (period_x < 1 || period_y < 1) throw InvalidArgument("PerlinParams: periods must be >= 1");
  if (octaves < 1) throw InvalidArgument("PerlinParams: octaves must be >= 1");
  if (!(persistence > 0.0 && persistence <= 1.0)) throw InvalidArgument("PerlinParams: persistence must be in (0, 1]");
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("PerlinParams: threshold must be in (0, 1)");
}

Mask foreground_mask(const ScalarMap& depth) {
  Mask out(depth.height, depth.width, 0);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double d = depth.values[i];
    if (!std::isfinite(d) || d < 0.0) {
      throw InvalidArgument("foreground_mask: depth must be finite and >= 0 (cell " + std::to_string(i) + ")");
    }
    out.values[i] = d > 0.0 ? 1 : 0;
  }
  return out;
}

ScalarMap depth_from_cloud(const PointCloudGrid& cloud) {
  ScalarMap depth(cloud.height, cloud.width, 0.0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.valid[i]) depth.values[i] = std::max(0.0, cloud.points[i].z());
  }
  return depth;
}

namespace {

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

// One octave of classic gradient noise over a (py x px)-cell lattice.
void add_octave(ScalarMap& field, int px, int py, double amplitude, Rng& rng) {
  const int gw = px + 1;
  const int gh = py + 1;
  std::vector<double> gx(static_cast<std::size_t>(gw) * gh);
  std::vector<double> gy(gx.size());
  for (std::size_t i = 0; i < gx.size(); ++i) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    gx[i] = std::cos(angle);
    gy[i] = std::sin(angle);
  }
  auto dot = [&](int iy, int ix, double dy, double dx) {
    const std::size_t g = static_cast<std::size_t>(iy) * gw + ix;
    return gx[g] * dx + gy[g] * dy;
  };
  for (int r = 0; r < field.height; ++r) {
    const double y = static_cast<double>(r) * py / field.height;
    const int iy = std::min(static_cast<int>(y), py - 1);
    const double fy = y - iy;
    const double uy = fade(fy);
    for (int c = 0; c < field.width; ++c) {
      const double x = static_cast<double>(c) * px / field.width;
      const int ix = std::min(static_cast<int>(x), px - 1);
      const double fx = x - ix;
      const double ux = fade(fx);
      const double n00 = dot(iy, ix, fy, fx);
      const double n01 = dot(iy, ix + 1, fy, fx - 1.0);
      const double n10 = dot(iy + 1, ix, fy - 1.0, fx);
      const double n11 = dot(iy + 1, ix + 1, fy - 1.0, fx - 1.0);
      const double top = n00 + ux * (n01 - n00);
      const double bot = n10 + ux * (n11 - n10);
      field(r, c) += amplitude * (top + uy * (bot - top));
    }
  }
}

}  // namespace

ScalarMap perlin_field(int h, int w, const PerlinParams& params, std::uint64_t seed) {
  params.validate();
  if (h < params.period_y || w < params.period_x) {
    throw InvalidArgument("perlin_field: grid smaller than lattice periods");
  }
  Rng rng(seed);
  ScalarMap field(h, w, 0.0);
  double amplitude = 1.0;
  for (int o = 0; o < params.octaves; ++o) {
    const int scale = 1 << o;
    add_octave(field, params.period_x * scale, params.period_y * scale, amplitude, rng);
    amplitude *= params.persistence;
  }
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    std::fill(field.values.begin(), field.values.end(), 0.5);
    return field;
  }
  for (double& v : field.values) v = std::clamp((v - min) / range, 0.0, 1.0);
  return field;
}

AnomalySample synthesize_anomaly_with_beta(const Image& x_plus, const ScalarMap& depth, const Image& source_image,
                                           const PerlinParams& params, std::uint64_t seed, double beta) {
  if (!depth.same_shape(x_plus.height, x_plus.width) || !source_image.same_shape(x_plus)) {
    throw InvalidArgument("synthesize_anomaly: image, depth and source shapes must agree");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("synthesize_anomaly: beta must be in [0, 1]");
  require_unit_range(x_plus, "synthesize_anomaly x_plus");
  require_unit_range(source_image, "synthesize_anomaly source");

  AnomalySample s;
  s.x_plus = x_plus;
  s.x_minus = x_plus;
  s.seed = seed;
  s.beta = beta;
  s.params = params;

  const Mask fg = foreground_mask(depth);
  s.mask = Mask(x_plus.height, x_plus.width, 0);
  s.empty_foreground = std::none_of(fg.values.begin(), fg.values.end(), [](auto v) { return v != 0; });
  if (s.empty_foreground) {
    s.empty_mask = true;
    return s;
  }

  const ScalarMap noise = perlin_field(x_plus.height, x_plus.width, params, derive_seed(seed, "perlin"));
  std::size_t marked = 0;
  for (int r = 0; r < x_plus.height; ++r) {
    for (int c = 0; c < x_plus.width; ++c) {
      if (!fg(r, c) || noise(r, c) < params.threshold) continue;
      s.mask(r, c) = 1;
      ++marked;
      for (int ch = 0; ch < 3; ++ch) {
        s.x_minus.at(r, c, ch) = beta * x_plus.at(r, c, ch) + (1.0 - beta) * source_image.at(r, c, ch);
      }
    }
  }
  s.empty_mask = marked == 0;
  return s;
}

AnomalySample synthesize_anomaly(const Image& x_plus, const ScalarMap& depth, const Image& source_image,
                                 const PerlinParams& params, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "opacity"));
  const double beta = rng.uniform(kMinBlendOpacity, 1.0);
  return synthesize_anomaly_with_beta(x_plus, depth, source_image, params, seed, beta);
}

PerlinParams draw_perlin_params(Rng& rng, int min_log2, int max_log2, double threshold) {
  if (min_log2 < 0 || max_log2 < min_log2) throw InvalidArgument("draw_perlin_params: bad exponent range");
  const auto span = static_cast<std::size_t>(max_log2 - min_log2 + 1);
  PerlinParams p;
  p.period_x = 1 << (min_log2 + static_cast<int>(rng.index(span)));
  p.period_y = 1 << (min_log2 + static_cast<int>(rng.index(span)));
  p.threshold = threshold;
  return p;
}

Image procedural_noise_texture(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  Image out(h, w);
  for (double& v : out.data) v = rng.uniform();
  return out;
}

}  // namespace mvfsad
