// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "mvfsad/errors.hpp"

namespace mvfsad {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'M', 'V', 'F', 'S', 'A', 'D', 'C', 'K'};
constexpr std::size_t kPrefix = 8 + 4 + 8;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t digest(const std::uint8_t* data, std::size_t n) {
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(data), n));
}

}  // namespace

Checkpoint make_checkpoint(const TrainableHead& head, const RunConfig& config, std::uint64_t seed) {
  Checkpoint ck;
  ck.config = config;
  ck.config.model = head.config();
  ck.head_seed = seed;
  ck.has_fusion = head.has_fusion();
  for (const auto& p : head.parameters()) ck.tensors.push_back({p.name, p.tensor.value()});
  return ck;
}

void apply_checkpoint(const Checkpoint& ckpt, TrainableHead& head) {
  ParamList params = head.parameters();
  if (params.size() != ckpt.tensors.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(ckpt.tensors.size()) + " tensors, model expects " +
                          std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const StoredTensor& s = ckpt.tensors[i];
    Tensor& t = params[i].tensor;
    if (s.name != params[i].name) throw CheckpointError("checkpoint tensor " + s.name + " where " + params[i].name + " expected");
    if (s.value.rows() != t.rows() || s.value.cols() != t.cols()) throw CheckpointError("shape mismatch for " + s.name);
    t.mutable_value() = s.value;
  }
}

TrainableHead head_from_checkpoint(const Checkpoint& ckpt) {
  TrainableHead head(ckpt.config.model, ckpt.head_seed, ckpt.has_fusion);
  apply_checkpoint(ckpt, head);
  return head;
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  json table = json::array();
  for (const auto& t : ckpt.tensors) table.push_back({{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}});
  const json header = {{"config", to_json(ckpt.config)},
                       {"head_seed", ckpt.head_seed},
                       {"has_fusion", ckpt.has_fusion},
                       {"dtype", "f64le"},
                       {"tensors", table}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  put_u32(out, ckpt.version);
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& t : ckpt.tensors) {
    for (Eigen::Index i = 0; i < t.value.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(t.value.data()[i]));
  }
  put_u64(out, digest(out.data(), out.size()));
  return out;
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw CheckpointError(origin + ": not a checkpoint file (bad magic)");
  }
  if (bytes.size() < 12) throw CheckpointError(origin + ": checksum error, file truncated");
  const std::uint32_t version = get_u32(bytes.data() + 8);
  if (version != Checkpoint::kFormatVersion) {
    throw CheckpointError(origin + ": unsupported checkpoint version " + std::to_string(version) + " (expected " +
                          std::to_string(Checkpoint::kFormatVersion) + ")");
  }
  if (bytes.size() < kPrefix + 8) throw CheckpointError(origin + ": checksum error, file truncated");
  const std::size_t body = bytes.size() - 8;
  if (digest(bytes.data(), body) != get_u64(bytes.data() + body)) {
    throw CheckpointError(origin + ": checksum error, file is corrupt or truncated");
  }

  const std::uint64_t header_len = get_u64(bytes.data() + 12);
  if (header_len > body - kPrefix) throw CheckpointError(origin + ": header length exceeds file size");
  Checkpoint ck;
  ck.version = version;
  try {
    const json header = json::parse(bytes.begin() + kPrefix, bytes.begin() + kPrefix + static_cast<std::ptrdiff_t>(header_len));
    if (header.value("dtype", "") != "f64le") throw CheckpointError(origin + ": unsupported tensor dtype");
    ck.config = run_config_from_json(header.at("config"));
    ck.head_seed = header.at("head_seed").get<std::uint64_t>();
    ck.has_fusion = header.at("has_fusion").get<bool>();
    std::size_t pos = kPrefix + header_len;
    for (const auto& entry : header.at("tensors")) {
      StoredTensor t;
      t.name = entry.at("name").get<std::string>();
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      if (rows < 0 || cols < 0) throw CheckpointError(origin + ": negative shape for " + t.name);
      const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
      if (n > (body - pos) / 8) throw CheckpointError(origin + ": tensor " + t.name + " runs past the payload");
      t.value.resize(rows, cols);
      for (std::size_t i = 0; i < n; ++i, pos += 8) t.value.data()[i] = std::bit_cast<double>(get_u64(bytes.data() + pos));
      ck.tensors.push_back(std::move(t));
    }
    if (pos != body) throw CheckpointError(origin + ": trailing bytes after tensor payload");
  } catch (const json::exception& e) {
    throw CheckpointError(origin + ": malformed header: " + e.what());
  } catch (const InvalidArgument& e) {
    throw CheckpointError(origin + ": invalid stored config: " + e.what());
  }
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes, path);
}

}  // namespace mvfsad
