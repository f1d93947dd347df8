// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/toy_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mvfsad/anomaly_synth.hpp"
#include "mvfsad/errors.hpp"
#include "mvfsad/random.hpp"

namespace mvfsad {

void ToyConfig::validate() const {
  if (size < 32) throw InvalidArgument("ToyConfig: size must be at least 32");
  if (train_shots < 1 || test_normal < 0 || test_anomalous < 0) throw InvalidArgument("ToyConfig: bad sample counts");
  if (!(beta_min >= 0.0 && beta_min < beta_max && beta_max <= 1.0)) throw InvalidArgument("ToyConfig: bad opacity range");
  if (min_mask_area < 1) throw InvalidArgument("ToyConfig: min_mask_area must be positive");
}

namespace {

struct Bump {
  double r, c, amp, sigma;
};

constexpr double kBackground = 0.08;

}  // namespace

ToySample make_toy_object(int size, std::uint64_t seed) {
  Rng rng(seed);
  const double n = size;
  const double center_r = n / 2 + rng.uniform(-0.04, 0.04) * n;
  const double center_c = n / 2 + rng.uniform(-0.04, 0.04) * n;
  const double semi_a = n * rng.uniform(0.30, 0.36);
  const double semi_b = n * rng.uniform(0.26, 0.32);
  const double phi = rng.uniform(0.0, std::numbers::pi);
  std::vector<Bump> bumps(3);
  for (auto& b : bumps) {
    b.r = center_r + rng.uniform(-0.5, 0.5) * semi_b;
    b.c = center_c + rng.uniform(-0.5, 0.5) * semi_a;
    b.amp = rng.uniform(0.02, 0.05);
    b.sigma = n * rng.uniform(0.08, 0.15);
  }
  const std::array<double, 3> base{0.78 + rng.uniform(-0.03, 0.03), 0.56 + rng.uniform(-0.03, 0.03),
                                   0.30 + rng.uniform(-0.03, 0.03)};
  const double stripe_angle = rng.uniform(0.0, std::numbers::pi);
  const double stripe_period = n * rng.uniform(0.15, 0.25);
  const double stripe_phase = rng.uniform(0.0, 2 * std::numbers::pi);

  const double cos_p = std::cos(phi);
  const double sin_p = std::sin(phi);
  auto rho2 = [&](double r, double c) {
    const double dy = r - center_r;
    const double dx = c - center_c;
    const double u = (dx * cos_p + dy * sin_p) / semi_a;
    const double v = (-dx * sin_p + dy * cos_p) / semi_b;
    return u * u + v * v;
  };
  auto depth_at = [&](double r, double c) {
    const double q = std::max(0.0, 1.0 - rho2(r, c));
    double z = 1.0 - 0.25 * std::sqrt(q);
    for (const auto& b : bumps) {
      const double d2 = (r - b.r) * (r - b.r) + (c - b.c) * (c - b.c);
      z -= b.amp * std::exp(-d2 / (2 * b.sigma * b.sigma)) * q;
    }
    return z;
  };

  ToySample s;
  s.id = "toy_" + std::to_string(seed);
  s.image = Image(size, size, kBackground);
  s.cloud = PointCloudGrid(size, size);
  s.mask = Mask(size, size, 0);
  const double f = n;
  const double c0 = (n - 1) / 2;
  const Eigen::Vector3d light = Eigen::Vector3d(-0.4, -0.5, -1.0).normalized();
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      if (rho2(r, c) >= 1.0) continue;
      const double z = depth_at(r, c);
      const std::size_t i = s.cloud.index(r, c);
      s.cloud.points[i] = Eigen::Vector3d((c - c0) * z / f, (r - c0) * z / f, z);
      s.cloud.valid[i] = 1;

      // Surface normal from the depth gradient, in pixel units scaled by f.
      const double dzdc = (depth_at(r, c + 1) - depth_at(r, c - 1)) * 0.5 * f;
      const double dzdr = (depth_at(r + 1, c) - depth_at(r - 1, c)) * 0.5 * f;
      const Eigen::Vector3d normal = Eigen::Vector3d(dzdc, dzdr, -1.0).normalized();
      const double shade = 0.55 + 0.45 * std::max(0.0, normal.dot(light));
      const double t = (c * std::cos(stripe_angle) + r * std::sin(stripe_angle)) / stripe_period;
      const double stripe = 0.08 * std::sin(2 * std::numbers::pi * t + stripe_phase);
      for (int ch = 0; ch < 3; ++ch) s.image.at(r, c, ch) = std::clamp((base[ch] + stripe) * shade, 0.0, 1.0);
    }
  }
  return s;
}

ToyDataset make_toy_dataset(const ToyConfig& config) {
  config.validate();
  ToyDataset ds;
  const std::uint64_t train_stream = derive_seed(config.seed, "toy.train");
  const std::uint64_t test_stream = derive_seed(config.seed, "toy.test");
  const std::uint64_t anomaly_stream = derive_seed(config.seed, "toy.anomaly");
  for (int k = 0; k < config.train_shots; ++k) {
    ToySample s = make_toy_object(config.size, mix_seed(train_stream, k));
    s.id = "train_" + std::to_string(k);
    ds.train.push_back(std::move(s));
  }
  for (int k = 0; k < config.test_normal; ++k) {
    ToySample s = make_toy_object(config.size, mix_seed(test_stream, k));
    s.id = "test_good_" + std::to_string(k);
    ds.test.push_back(std::move(s));
  }
  for (int k = 0; k < config.test_anomalous; ++k) {
    ToySample s = make_toy_object(config.size, mix_seed(test_stream, 100000 + k));
    const ScalarMap depth = depth_from_cloud(s.cloud);
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt == 64) throw NumericError("make_toy_dataset: could not draw a large enough anomaly mask");
      const std::uint64_t seed = mix_seed(mix_seed(anomaly_stream, k), attempt);
      Rng rng(seed);
      const PerlinParams params = draw_perlin_params(rng);
      const double beta = rng.uniform(config.beta_min, config.beta_max);
      const Image source = procedural_noise_texture(config.size, config.size, derive_seed(seed, "texture"));
      AnomalySample a = synthesize_anomaly_with_beta(s.image, depth, source, params, seed, beta);
      const auto area = std::count(a.mask.values.begin(), a.mask.values.end(), std::uint8_t{1});
      if (area < config.min_mask_area) continue;
      s.image = std::move(a.x_minus);
      s.mask = std::move(a.mask);
      break;
    }
    s.label = 1;
    s.id = "test_anomaly_" + std::to_string(k);
    ds.test.push_back(std::move(s));
  }
  return ds;
}

}  // namespace mvfsad
