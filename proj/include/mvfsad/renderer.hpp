// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Z-buffered point splatting of textured organized clouds.

#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "mvfsad/geometry.hpp"
#include "mvfsad/image.hpp"

namespace mvfsad {

struct RenderedView {
  Image image;
  Mask coverage;  // 1 where at least one point landed

  friend bool operator==(const RenderedView&, const RenderedView&) = default;
};

enum class TextureSource { kNormal, kAnomalous };

struct MultiViewSet {
  std::vector<RenderedView> views;
  TextureSource source = TextureSource::kNormal;
};

struct RenderSettings {
  int canvas_height = 240;
  int canvas_width = 240;
  std::array<double, 3> background{0.0, 0.0, 0.0};
};

/// One projected, coloured point. `index` is its row-major source index.
struct Splat {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  std::array<double, 3> color{};
  std::size_t index = 0;
};

/// Nearest-pixel splatting; the smallest (depth, index) pair wins each pixel,
/// so the result does not depend on the order of `splats`.
RenderedView rasterize(std::span<const Splat> splats, const RenderSettings& settings);

RenderedView render_view(const PointCloudGrid& cloud, const Image& texture, const Rot3& rotation,
                         const CameraModel& camera, const RenderSettings& settings);

std::pair<MultiViewSet, MultiViewSet> render_multiview(const PointCloudGrid& cloud, const Image& texture_normal,
                                                       const Image& texture_anomalous,
                                                       std::span<const RotationAngles> grid,
                                                       const CameraModel& camera, const RenderSettings& settings);

/// Picks views by 1-based index, in the order given.
std::vector<RenderedView> select_views(const MultiViewSet& set, std::span<const int> indices);

/// Renders only the views named by 1-based `indices` into `grid`.
std::vector<RenderedView> render_selected(const PointCloudGrid& cloud, const Image& texture,
                                          std::span<const RotationAngles> grid, std::span<const int> indices,
                                          const CameraModel& camera, const RenderSettings& settings);

/// Cloud centred on its centroid plus a camera that puts the centroid back in
/// place, so the identity view reproduces the sensor layout on the canvas and
/// the other views turn the object about its own centre.
struct ViewRig {
  PointCloudGrid cloud;
  CameraModel camera;
};
ViewRig make_view_rig(const PointCloudGrid& sensor_cloud, const RenderSettings& settings);

}  // namespace mvfsad
