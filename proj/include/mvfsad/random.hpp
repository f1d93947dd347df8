// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace mvfsad {

/// Seeded generator with platform-independent draws.
///
/// std::uniform_real_distribution and friends are implementation-defined, so
/// every draw here is derived directly from mt19937_64 output bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// SplitMix64 finalizer; used to derive independent seed streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return mix_seed(seed, fnv1a64(tag));
}

}  // namespace mvfsad
