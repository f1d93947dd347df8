// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "mvfsad/random.hpp"

using namespace mvfsad;

TEST_CASE("Rng is deterministic in its seed") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    differs = differs || x != c.uniform();
  }
  CHECK(differs);
}

TEST_CASE("uniform draws stay in [0, 1) and index in range") {
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(r.index(13) < 13);
  }
}

TEST_CASE("normal draws have roughly unit moments") {
  Rng r(11);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("derived seeds separate streams") {
  CHECK(derive_seed(1, "decoder") != derive_seed(1, "fusion.global"));
  CHECK(derive_seed(1, "decoder") != derive_seed(2, "decoder"));
  CHECK(derive_seed(5, "x") == derive_seed(5, "x"));
}
