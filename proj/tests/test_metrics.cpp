// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "metric_oracles.hpp"
#include "mvfsad/errors.hpp"
#include "mvfsad/metrics.hpp"
#include "mvfsad/random.hpp"

using namespace mvfsad;

namespace {

struct Instance {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

// Scores rounded to two decimals so ties are common.
Instance random_instance(Rng& r, std::size_t n) {
  Instance out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t y = r.uniform() < 0.3 ? 1 : 0;
    out.labels.push_back(y);
    out.scores.push_back(std::round((r.uniform() + 0.3 * y) * 100.0) / 100.0);
  }
  out.labels[0] = 1;
  out.labels[1] = 0;
  return out;
}

Mask random_mask(Rng& r, int h, int w, double p) {
  Mask m(h, w, 0);
  for (auto& v : m.values) v = r.uniform() < p ? 1 : 0;
  return m;
}

ScalarMap noisy_map(Rng& r, const Mask& m) {
  ScalarMap s(m.height, m.width);
  for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = std::round((r.uniform() + 0.5 * m.values[i]) * 20.0) / 20.0;
  return s;
}

}  // namespace

TEST_CASE("auroc small cases") {
  const std::vector<double> s{0.1, 0.9};
  CHECK(auroc(s, std::vector<std::uint8_t>{0, 1}) == 1.0);
  CHECK(auroc(s, std::vector<std::uint8_t>{1, 0}) == 0.0);
  CHECK(auroc(std::vector<double>{0.5, 0.5}, std::vector<std::uint8_t>{1, 0}) == 0.5);
  CHECK_THROWS_AS(auroc(s, std::vector<std::uint8_t>{1, 1}), UndefinedMetric);
  CHECK_THROWS_AS(auroc(s, std::vector<std::uint8_t>{1}), InvalidArgument);
  CHECK_THROWS_AS(auroc(std::vector<double>{NAN, 0.1}, std::vector<std::uint8_t>{1, 0}), InvalidArgument);
}

TEST_CASE("auroc, aupr and p_auroc against brute-force oracles") {
  Rng r(31);
  for (int k = 0; k < 50; ++k) {
    const Instance in = random_instance(r, 200);
    CHECK(std::abs(auroc(in.scores, in.labels) - oracle::auroc(in.scores, in.labels)) <= 1e-9);
    CHECK(std::abs(aupr(in.scores, in.labels) - oracle::aupr(in.scores, in.labels)) <= 1e-9);
  }
  for (int k = 0; k < 20; ++k) {
    std::vector<ScalarMap> maps;
    std::vector<Mask> masks;
    std::vector<double> pooled;
    std::vector<std::uint8_t> labels;
    for (int i = 0; i < 3; ++i) {
      masks.push_back(random_mask(r, 6, 7, 0.3));
      maps.push_back(noisy_map(r, masks.back()));
      pooled.insert(pooled.end(), maps.back().values.begin(), maps.back().values.end());
      labels.insert(labels.end(), masks.back().values.begin(), masks.back().values.end());
    }
    CHECK(std::abs(p_auroc(maps, masks) - oracle::auroc(pooled, labels)) <= 1e-9);
  }
}

TEST_CASE("auroc is invariant under monotone transforms") {
  Rng r(32);
  const Instance in = random_instance(r, 100);
  std::vector<double> t;
  for (const double s : in.scores) t.push_back(std::exp(3.0 * s) - 2.0);
  CHECK(auroc(t, in.labels) == auroc(in.scores, in.labels));
}

TEST_CASE("aupr special cases") {
  const std::vector<std::uint8_t> y{1, 0, 0, 1, 0};
  CHECK(aupr(std::vector<double>{0.9, 0.1, 0.2, 0.8, 0.3}, y) == 1.0);
  CHECK(aupr(std::vector<double>(5, 0.4), y) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(aupr(std::vector<double>(5, 0.4), std::vector<std::uint8_t>(5, 0)), UndefinedMetric);
}

TEST_CASE("p_auroc trivial cases") {
  Rng r(33);
  Mask m = random_mask(r, 5, 5, 0.4);
  ScalarMap same(5, 5);
  ScalarMap inverse(5, 5);
  for (std::size_t i = 0; i < m.size(); ++i) {
    same.values[i] = m.values[i];
    inverse.values[i] = 1.0 - m.values[i];
  }
  const std::vector<Mask> masks{m};
  CHECK(p_auroc(std::vector<ScalarMap>{same}, masks) == 1.0);
  CHECK(p_auroc(std::vector<ScalarMap>{inverse}, masks) == 0.0);
  CHECK_THROWS_AS(p_auroc(std::vector<ScalarMap>{ScalarMap(4, 5)}, masks), InvalidArgument);
}

TEST_CASE("aupro hand cases") {
  // 4x4 with a 2x2 defect.
  Mask m4(4, 4, 0);
  m4(1, 1) = m4(1, 2) = m4(2, 1) = m4(2, 2) = 1;
  ScalarMap exact(4, 4, 0.0);
  for (std::size_t i = 0; i < m4.size(); ++i) exact.values[i] = m4.values[i];
  CHECK(aupro(std::vector<ScalarMap>{exact}, std::vector<Mask>{m4}) == 1.0);
  CHECK(aupro(std::vector<ScalarMap>{ScalarMap(4, 4, 0.0)}, std::vector<Mask>{m4}) == 0.0);

  // 8x8 with two separate regions; only the first is predicted.
  Mask m8(8, 8, 0);
  ScalarMap half(8, 8, 0.0);
  for (int r = 1; r <= 2; ++r) {
    for (int c = 1; c <= 2; ++c) {
      m8(r, c) = 1;
      half(r, c) = 1.0;
      m8(r + 4, c + 4) = 1;
    }
  }
  CHECK(aupro(std::vector<ScalarMap>{half}, std::vector<Mask>{m8}) == 0.5);
}

TEST_CASE("aupro against the flood-fill oracle") {
  Rng r(34);
  for (int k = 0; k < 30; ++k) {
    const int h = 4 + static_cast<int>(r.index(13));
    const int w = 4 + static_cast<int>(r.index(13));
    std::vector<Mask> masks{random_mask(r, h, w, 0.25), random_mask(r, h, w, 0.1)};
    masks[0](0, 0) = 1;
    masks[0](h - 1, w - 1) = 0;
    std::vector<ScalarMap> maps{noisy_map(r, masks[0]), noisy_map(r, masks[1])};
    for (const double limit : {0.05, 0.3, 1.0}) {
      CHECK(std::abs(aupro(maps, masks, limit) - oracle::aupro(maps, masks, limit)) <= 1e-12);
    }
    CHECK(aupro(maps, masks, 0.1) <= aupro(maps, masks, 0.3) + 1e-12);
  }
}

TEST_CASE("connected components use 8-connectivity") {
  Mask diag(3, 3, 0);
  diag(0, 0) = diag(1, 1) = diag(2, 2) = 1;
  Plane<int> labels;
  CHECK(label_components(diag, labels) == 1);
  Mask apart(3, 3, 0);
  apart(0, 0) = apart(2, 2) = 1;
  CHECK(label_components(apart, labels) == 2);
  CHECK(labels(0, 0) != labels(2, 2));
  CHECK(labels(1, 1) == 0);
}

TEST_CASE("aupro errors") {
  const std::vector<ScalarMap> maps{ScalarMap(3, 3, 0.5)};
  CHECK_THROWS_AS(aupro(maps, std::vector<Mask>{Mask(3, 3, 0)}), UndefinedMetric);
  CHECK_THROWS_AS(aupro(maps, std::vector<Mask>{Mask(3, 3, 1)}), UndefinedMetric);
  CHECK_THROWS_AS(aupro(maps, std::vector<Mask>{Mask(3, 3, 1)}, 0.0), InvalidArgument);
}
