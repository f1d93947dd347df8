// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/point_grid_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "mvfsad/errors.hpp"

namespace mvfsad {
namespace {

constexpr char kMagic[4] = {'P', 'G', 'R', 'D'};
constexpr std::uint32_t kMaxSide = 1u << 15;

std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32(unsigned char* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
}

float load_f32(const unsigned char* p) { return std::bit_cast<float>(load_u32(p)); }

void store_f32(unsigned char* p, float v) { store_u32(p, std::bit_cast<std::uint32_t>(v)); }

[[noreturn]] void corrupt(const std::string& path, std::size_t offset, const std::string& what) {
  throw IoError(path + ": " + what + " (byte offset " + std::to_string(offset) + ")");
}

}  // namespace

PointCloudGrid read_point_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4) corrupt(path, bytes.size(), "file too short for magic");
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<unsigned char>(kMagic[i])) corrupt(path, i, "bad magic, expected PGRD");
  }
  if (bytes.size() < 12) corrupt(path, bytes.size(), "truncated header");
  const std::uint32_t h = load_u32(&bytes[4]);
  const std::uint32_t w = load_u32(&bytes[8]);
  if (h == 0 || h > kMaxSide) corrupt(path, 4, "invalid height " + std::to_string(h));
  if (w == 0 || w > kMaxSide) corrupt(path, 8, "invalid width " + std::to_string(w));
  const std::size_t expected = 12 + static_cast<std::size_t>(h) * w * 12;
  if (bytes.size() < expected) {
    corrupt(path, bytes.size(), "truncated payload, expected " + std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) corrupt(path, expected, "trailing bytes after payload");

  PointCloudGrid grid(static_cast<int>(h), static_cast<int>(w));
  const unsigned char* p = bytes.data() + 12;
  for (std::size_t i = 0; i < grid.size(); ++i, p += 12) {
    const Eigen::Vector3d v(load_f32(p), load_f32(p + 4), load_f32(p + 8));
    const bool ok = v.allFinite() && v.z() != 0.0;
    grid.valid[i] = ok ? 1 : 0;
    grid.points[i] = ok ? v : Eigen::Vector3d::Zero();
  }
  return grid;
}

void write_point_grid(const std::string& path, const PointCloudGrid& grid) {
  if (grid.height <= 0 || grid.width <= 0) throw InvalidArgument("write_point_grid: empty grid");
  std::vector<unsigned char> bytes(12 + grid.size() * 12, 0);
  std::memcpy(bytes.data(), kMagic, 4);
  store_u32(&bytes[4], static_cast<std::uint32_t>(grid.height));
  store_u32(&bytes[8], static_cast<std::uint32_t>(grid.width));
  unsigned char* p = bytes.data() + 12;
  for (std::size_t i = 0; i < grid.size(); ++i, p += 12) {
    if (!grid.valid[i]) continue;  // zeros mark invalid points
    for (int k = 0; k < 3; ++k) store_f32(p + 4 * k, static_cast<float>(grid.points[i][k]));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path);
}

PointCloudGrid resize_nearest_valid(const PointCloudGrid& grid, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) throw InvalidArgument("resize_nearest_valid: output size must be positive");
  if (grid.height == out_h && grid.width == out_w) return grid;
  PointCloudGrid out(out_h, out_w);
  const double sy = static_cast<double>(grid.height) / out_h;
  const double sx = static_cast<double>(grid.width) / out_w;
  // Search radius covers the source footprint of one output pixel.
  const int ry = std::max(0, static_cast<int>(std::ceil(sy / 2.0)));
  const int rx = std::max(0, static_cast<int>(std::ceil(sx / 2.0)));
  for (int r = 0; r < out_h; ++r) {
    const double fy = (r + 0.5) * sy - 0.5;
    const int r0 = std::clamp(static_cast<int>(std::lround(fy)), 0, grid.height - 1);
    for (int c = 0; c < out_w; ++c) {
      const double fx = (c + 0.5) * sx - 0.5;
      const int c0 = std::clamp(static_cast<int>(std::lround(fx)), 0, grid.width - 1);
      std::size_t best = grid.size();
      double best_d = std::numeric_limits<double>::infinity();
      for (int dr = -ry; dr <= ry; ++dr) {
        const int rr = r0 + dr;
        if (rr < 0 || rr >= grid.height) continue;
        for (int dc = -rx; dc <= rx; ++dc) {
          const int cc = c0 + dc;
          if (cc < 0 || cc >= grid.width) continue;
          const std::size_t i = grid.index(rr, cc);
          if (!grid.valid[i]) continue;
          const double d = (rr - fy) * (rr - fy) + (cc - fx) * (cc - fx);
          if (d < best_d) {
            best_d = d;
            best = i;
          }
        }
      }
      if (best < grid.size()) {
        const std::size_t o = out.index(r, c);
        out.points[o] = grid.points[best];
        out.valid[o] = 1;
      }
    }
  }
  return out;
}

}  // namespace mvfsad
