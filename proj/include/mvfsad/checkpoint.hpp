// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint file layout (all integers little-endian):
//
//   8 bytes   magic "MVFSADCK"
//   u32       format version
//   u64       header length in bytes
//   header    UTF-8 JSON: configs, head seed, tensor table (name, rows, cols)
//   payload   tensor entries as IEEE-754 binary64, in table order
//   u64       FNV-1a 64 of every preceding byte
//
// Parameters are stored as binary64 so that a save/load round-trip is exact.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvfsad/config.hpp"

namespace mvfsad {

struct StoredTensor {
  std::string name;
  Matrix value;
};

struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint32_t version = kFormatVersion;
  RunConfig config;
  std::uint64_t head_seed = 0;
  bool has_fusion = false;
  std::vector<StoredTensor> tensors;
};

Checkpoint make_checkpoint(const TrainableHead& head, const RunConfig& config, std::uint64_t head_seed);

/// Copies stored values into a head with the same parameter names and shapes.
void apply_checkpoint(const Checkpoint& ckpt, TrainableHead& head);

/// Builds a head from the stored configuration and loads the parameters.
TrainableHead head_from_checkpoint(const Checkpoint& ckpt);

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& origin = "<memory>");

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Throws CheckpointError on bad magic, version mismatch, checksum mismatch
/// or a malformed header.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mvfsad
