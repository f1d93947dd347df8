// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>

#include "mvfsad/errors.hpp"
#include "mvfsad/image_io.hpp"
#include "mvfsad/point_grid_io.hpp"

namespace mvfsad {

namespace fs = std::filesystem;

namespace {

std::optional<fs::path> find_with_stem(const fs::path& dir, const std::string& stem,
                                       std::initializer_list<const char*> exts) {
  for (const char* ext : exts) {
    fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

bool is_image_ext(const fs::path& p) {
  const std::string e = p.extension().string();
  return e == ".png" || e == ".ppm" || e == ".PNG";
}

}  // namespace

LoadedSample load_sample(const DatasetSample& sample, int size) {
  if (size <= 0) throw InvalidArgument("load_sample: size must be positive");
  LoadedSample out;
  const Image rgb = read_image(sample.rgb_path);
  const PointCloudGrid grid = read_point_grid(sample.grid_path);
  if (grid.height != rgb.height || grid.width != rgb.width) {
    throw IoError("dimension mismatch: " + sample.rgb_path + " is " + std::to_string(rgb.height) + "x" +
                  std::to_string(rgb.width) + " but " + sample.grid_path + " is " + std::to_string(grid.height) +
                  "x" + std::to_string(grid.width));
  }
  out.image = rgb.height == size && rgb.width == size ? rgb : resize_bilinear(rgb, size, size);
  out.cloud = resize_nearest_valid(grid, size, size);
  if (sample.mask_path) {
    ScalarMap gray = read_gray(*sample.mask_path);
    if (gray.height != rgb.height || gray.width != rgb.width) {
      throw IoError("dimension mismatch: mask " + *sample.mask_path + " does not match " + sample.rgb_path);
    }
    if (gray.height != size || gray.width != size) gray = resize_bilinear(gray, size, size);
    Mask m(size, size, 0);
    for (std::size_t i = 0; i < m.size(); ++i) m.values[i] = gray.values[i] >= 0.5 ? 1 : 0;
    out.mask = std::move(m);
  }
  return out;
}

std::vector<DatasetSample> list_samples(const std::string& root, const std::string& class_name,
                                        const std::string& split) {
  const fs::path split_dir = fs::path(root) / class_name / split;
  if (!fs::is_directory(split_dir)) throw IoError("no such dataset directory: " + split_dir.string());
  std::vector<fs::path> defects;
  for (const auto& e : fs::directory_iterator(split_dir)) {
    if (e.is_directory()) defects.push_back(e.path());
  }
  std::sort(defects.begin(), defects.end());
  std::vector<DatasetSample> out;
  for (const auto& dir : defects) {
    const fs::path rgb_dir = dir / "rgb";
    if (!fs::is_directory(rgb_dir)) continue;
    std::vector<fs::path> rgbs;
    for (const auto& e : fs::directory_iterator(rgb_dir)) {
      if (e.is_regular_file() && is_image_ext(e.path())) rgbs.push_back(e.path());
    }
    std::sort(rgbs.begin(), rgbs.end());
    for (const auto& rgb : rgbs) {
      DatasetSample s;
      s.name = rgb.stem().string();
      s.rgb_path = rgb.string();
      const auto grid = find_with_stem(dir / "xyz", s.name, {".pgrd"});
      if (!grid) throw IoError("missing point grid for " + rgb.string());
      s.grid_path = grid->string();
      if (const auto gt = find_with_stem(dir / "gt", s.name, {".png", ".pgm"})) s.mask_path = gt->string();
      s.class_name = class_name;
      s.split = split;
      s.defect = dir.filename().string();
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::string default_data_root() {
  const char* env = std::getenv("MVFSAD_DATA_ROOT");
  return env && *env ? std::string(env) : std::string("data");
}

void write_sample(const std::string& root, const std::string& class_name, const std::string& split,
                  const std::string& defect, const std::string& name, const Image& image,
                  const PointCloudGrid& cloud, const std::optional<Mask>& mask) {
  const fs::path dir = fs::path(root) / class_name / split / defect;
  fs::create_directories(dir / "rgb");
  fs::create_directories(dir / "xyz");
  write_image((dir / "rgb" / (name + ".png")).string(), image);
  write_point_grid((dir / "xyz" / (name + ".pgrd")).string(), cloud);
  if (mask) {
    fs::create_directories(dir / "gt");
    write_mask((dir / "gt" / (name + ".png")).string(), *mask);
  }
}

}  // namespace mvfsad
