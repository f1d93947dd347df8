// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mvfsad/errors.hpp"

namespace mvfsad {

RenderedView rasterize(std::span<const Splat> splats, const RenderSettings& settings) {
  const int h = settings.canvas_height;
  const int w = settings.canvas_width;
  if (h <= 0 || w <= 0) throw InvalidArgument("rasterize: canvas must be non-empty");

  RenderedView out{Image(h, w), Mask(h, w, 0)};
  std::vector<double> zbuf(static_cast<std::size_t>(h) * w, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> owner(zbuf.size(), std::numeric_limits<std::size_t>::max());
  std::vector<const Splat*> winner(zbuf.size(), nullptr);

  for (const Splat& s : splats) {
    const double col = std::nearbyint(s.u);
    const double row = std::nearbyint(s.v);
    if (!(col >= 0 && col < w && row >= 0 && row < h)) continue;
    const std::size_t px = static_cast<std::size_t>(row) * w + static_cast<std::size_t>(col);
    if (s.depth < zbuf[px] || (s.depth == zbuf[px] && s.index < owner[px])) {
      zbuf[px] = s.depth;
      owner[px] = s.index;
      winner[px] = &s;
    }
  }

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Splat* s = winner[static_cast<std::size_t>(r) * w + c];
      if (s == nullptr) {
        out.image.set_pixel(r, c, settings.background);
        continue;
      }
      out.coverage(r, c) = 1;
      out.image.set_pixel(r, c, {std::clamp(s->color[0], 0.0, 1.0), std::clamp(s->color[1], 0.0, 1.0),
                                 std::clamp(s->color[2], 0.0, 1.0)});
    }
  }
  return out;
}

RenderedView render_view(const PointCloudGrid& cloud, const Image& texture, const Rot3& rotation,
                         const CameraModel& camera, const RenderSettings& settings) {
  if (texture.height != cloud.height || texture.width != cloud.width) {
    throw InvalidArgument("render_view: texture " + std::to_string(texture.height) + "x" +
                          std::to_string(texture.width) + " does not match cloud " + std::to_string(cloud.height) +
                          "x" + std::to_string(cloud.width));
  }
  const PointCloudGrid rotated = rotate_cloud(cloud, rotation);
  const std::vector<Projection> proj = project_points(rotated, camera);
  std::vector<Splat> splats;
  splats.reserve(cloud.valid_count());
  for (int r = 0; r < cloud.height; ++r) {
    for (int c = 0; c < cloud.width; ++c) {
      const std::size_t i = cloud.index(r, c);
      if (!cloud.valid[i] || !proj[i].visible) continue;
      splats.push_back({proj[i].u, proj[i].v, proj[i].depth, texture.pixel(r, c), i});
    }
  }
  return rasterize(splats, settings);
}

std::pair<MultiViewSet, MultiViewSet> render_multiview(const PointCloudGrid& cloud, const Image& texture_normal,
                                                       const Image& texture_anomalous,
                                                       std::span<const RotationAngles> grid,
                                                       const CameraModel& camera, const RenderSettings& settings) {
  MultiViewSet normal{{}, TextureSource::kNormal};
  MultiViewSet anomalous{{}, TextureSource::kAnomalous};
  normal.views.reserve(grid.size());
  anomalous.views.reserve(grid.size());
  for (const RotationAngles& angles : grid) {
    const Rot3 r = rotation_matrix(angles);
    normal.views.push_back(render_view(cloud, texture_normal, r, camera, settings));
    anomalous.views.push_back(render_view(cloud, texture_anomalous, r, camera, settings));
  }
  return {std::move(normal), std::move(anomalous)};
}

namespace {

void check_indices(std::span<const int> indices, std::size_t count) {
  std::vector<int> seen;
  for (const int i : indices) {
    if (i < 1 || static_cast<std::size_t>(i) > count) {
      throw InvalidArgument("view index " + std::to_string(i) + " outside 1.." + std::to_string(count));
    }
    if (std::find(seen.begin(), seen.end(), i) != seen.end()) {
      throw InvalidArgument("duplicate view index " + std::to_string(i));
    }
    seen.push_back(i);
  }
}

}  // namespace

std::vector<RenderedView> select_views(const MultiViewSet& set, std::span<const int> indices) {
  check_indices(indices, set.views.size());
  std::vector<RenderedView> out;
  out.reserve(indices.size());
  for (const int i : indices) out.push_back(set.views[static_cast<std::size_t>(i - 1)]);
  return out;
}

std::vector<RenderedView> render_selected(const PointCloudGrid& cloud, const Image& texture,
                                          std::span<const RotationAngles> grid, std::span<const int> indices,
                                          const CameraModel& camera, const RenderSettings& settings) {
  check_indices(indices, grid.size());
  std::vector<RenderedView> out;
  out.reserve(indices.size());
  for (const int i : indices) {
    out.push_back(render_view(cloud, texture, rotation_matrix(grid[static_cast<std::size_t>(i - 1)]), camera,
                              settings));
  }
  return out;
}

ViewRig make_view_rig(const PointCloudGrid& sensor_cloud, const RenderSettings& settings) {
  ViewRig rig;
  rig.cloud = center_cloud(sensor_cloud);
  const double sx = sensor_cloud.width > 0 ? static_cast<double>(settings.canvas_width) / sensor_cloud.width : 1.0;
  const double sy = sensor_cloud.height > 0 ? static_cast<double>(settings.canvas_height) / sensor_cloud.height : 1.0;
  rig.camera = fit_grid_camera(sensor_cloud).rescaled(sx, sy);
  rig.camera.extrinsic.translation = sensor_cloud.centroid();
  return rig;
}

}  // namespace mvfsad
