// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "mvfsad/anomaly_synth.hpp"
#include "mvfsad/errors.hpp"
#include "mvfsad/toy_data.hpp"

using namespace mvfsad;

TEST_CASE("foreground_mask") {
  CHECK(foreground_mask(ScalarMap(3, 4, 0.0)) == Mask(3, 4, 0));
  CHECK(foreground_mask(ScalarMap(3, 4, 0.5)) == Mask(3, 4, 1));
  ScalarMap checker(4, 4);
  Mask expected(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      checker(r, c) = (r + c) % 2;
      expected(r, c) = (r + c) % 2;
    }
  }
  CHECK(foreground_mask(checker) == expected);
  ScalarMap negative(2, 2, 1.0);
  negative(1, 1) = -0.1;
  CHECK_THROWS_AS(foreground_mask(negative), InvalidArgument);
}

TEST_CASE("perlin_field is seeded, bounded and seed-sensitive") {
  PerlinParams p;
  p.octaves = 3;
  const ScalarMap a = perlin_field(40, 50, p, 123);
  CHECK(a == perlin_field(40, 50, p, 123));
  CHECK(*std::min_element(a.values.begin(), a.values.end()) >= 0.0);
  CHECK(*std::max_element(a.values.begin(), a.values.end()) <= 1.0);
  for (std::uint64_t s = 0; s < 10; ++s) CHECK(perlin_field(40, 50, p, 2 * s) != perlin_field(40, 50, p, 2 * s + 1));
  p.period_x = 64;
  CHECK_THROWS_AS(perlin_field(40, 50, p, 1), InvalidArgument);
}

TEST_CASE("perlin_field returns 0.5 for a constant field") {
  // One lattice cell sampled only at lattice corners is identically zero.
  PerlinParams p;
  p.period_x = 1;
  p.period_y = 1;
  const ScalarMap f = perlin_field(1, 1, p, 9);
  CHECK(f.values == std::vector<double>{0.5});
}

TEST_CASE("synthesize_anomaly contracts") {
  const ToySample s = make_toy_object(64, 5);
  const ScalarMap depth = depth_from_cloud(s.cloud);
  const Mask fg = foreground_mask(depth);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r(seed);
    const PerlinParams p = draw_perlin_params(r);
    const Image source = procedural_noise_texture(64, 64, seed + 100);
    const AnomalySample a = synthesize_anomaly(s.image, depth, source, p, seed);
    CHECK(a.beta >= kMinBlendOpacity);
    CHECK(a.beta < 1.0);
    bool changed = false;
    for (int row = 0; row < 64; ++row) {
      for (int col = 0; col < 64; ++col) {
        if (a.mask(row, col)) {
          CHECK(fg(row, col) == 1);
          changed = changed || a.x_minus.pixel(row, col) != s.image.pixel(row, col);
        } else {
          CHECK(a.x_minus.pixel(row, col) == s.image.pixel(row, col));
        }
      }
    }
    CHECK(changed != a.empty_mask);
    const AnomalySample again = synthesize_anomaly(s.image, depth, source, p, seed);
    CHECK(again.x_minus == a.x_minus);
    CHECK(again.mask == a.mask);
    CHECK(again.beta == a.beta);
  }
}

TEST_CASE("blend formula inside the mask") {
  const ToySample s = make_toy_object(32, 8);
  const ScalarMap depth = depth_from_cloud(s.cloud);
  const Image source = procedural_noise_texture(32, 32, 4);
  const AnomalySample a = synthesize_anomaly_with_beta(s.image, depth, source, PerlinParams{}, 77, 0.3);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      if (!a.mask(r, c)) continue;
      for (int ch = 0; ch < 3; ++ch) {
        CHECK(a.x_minus.at(r, c, ch) == doctest::Approx(0.3 * s.image.at(r, c, ch) + 0.7 * source.at(r, c, ch)));
      }
    }
  }
}

TEST_CASE("all-background depth gives an empty, flagged sample") {
  const Image img(16, 16, 0.4);
  const AnomalySample a =
      synthesize_anomaly(img, ScalarMap(16, 16, 0.0), procedural_noise_texture(16, 16, 1), PerlinParams{}, 3);
  CHECK(a.empty_foreground);
  CHECK(a.empty_mask);
  CHECK(a.x_minus == img);
  CHECK(a.mask == Mask(16, 16, 0));
}

TEST_CASE("shape and range errors") {
  const Image img(8, 8, 0.5);
  CHECK_THROWS_AS(synthesize_anomaly(img, ScalarMap(8, 9, 1.0), img, PerlinParams{}, 1), InvalidArgument);
  Image bad = img;
  bad.data[0] = 1.5;
  CHECK_THROWS_AS(synthesize_anomaly(bad, ScalarMap(8, 8, 1.0), img, PerlinParams{}, 1), InvalidArgument);
  PerlinParams p;
  p.threshold = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}
