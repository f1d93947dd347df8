// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0

#include "mvfsad/geometry.hpp"

#include <cmath>
#include <numbers>

#include "mvfsad/errors.hpp"

namespace mvfsad {

PointCloudGrid::PointCloudGrid(int h, int w)
    : height(h),
      width(w),
      points(static_cast<std::size_t>(h) * w, Eigen::Vector3d::Zero()),
      valid(static_cast<std::size_t>(h) * w, 0) {
  if (h < 0 || w < 0) throw InvalidArgument("PointCloudGrid: negative dimensions");
}

std::size_t PointCloudGrid::valid_count() const {
  std::size_t n = 0;
  for (const auto v : valid) n += v ? 1 : 0;
  return n;
}

Eigen::Vector3d PointCloudGrid::centroid() const {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  std::size_t n = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!valid[i]) continue;
    sum += points[i];
    ++n;
  }
  return n == 0 ? sum : Eigen::Vector3d(sum / static_cast<double>(n));
}

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidArgument("CameraModel: focal lengths must be positive");
  const Eigen::Matrix3d rtr = extrinsic.rotation.transpose() * extrinsic.rotation;
  if ((rtr - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
    throw InvalidArgument("CameraModel: extrinsic rotation is not orthogonal");
  }
}

CameraModel CameraModel::rescaled(double sx, double sy) const {
  CameraModel c = *this;
  c.fx *= sx;
  c.fy *= sy;
  // Pixel centres map to pixel centres.
  c.cx = (cx + 0.5) * sx - 0.5;
  c.cy = (cy + 0.5) * sy - 0.5;
  return c;
}

Rot3 rotation_matrix(const RotationAngles& angles) {
  if (!std::isfinite(angles.theta_x) || !std::isfinite(angles.theta_y) || !std::isfinite(angles.theta_z)) {
    throw InvalidArgument("rotation_matrix: angles must be finite");
  }
  const double cx = std::cos(angles.theta_x), sx = std::sin(angles.theta_x);
  const double cy = std::cos(angles.theta_y), sy = std::sin(angles.theta_y);
  const double cz = std::cos(angles.theta_z), sz = std::sin(angles.theta_z);
  Eigen::Matrix3d first;
  first << cx, sx, 0.0, -sx, cx, 0.0, 0.0, 0.0, 1.0;
  Eigen::Matrix3d second;
  second << cy, 0.0, sy, 0.0, 1.0, 0.0, -sy, 0.0, cy;
  Eigen::Matrix3d third;
  third << 1.0, 0.0, 0.0, 0.0, cz, sz, 0.0, -sz, cz;
  return Rot3{first * second * third};
}

PointCloudGrid rotate_cloud(const PointCloudGrid& cloud, const Rot3& r) {
  PointCloudGrid out = cloud;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (out.valid[i]) out.points[i] = r.m * cloud.points[i];
  }
  return out;
}

std::vector<RotationAngles> view_grid(const std::array<double, 3>& a) {
  for (const double v : a) {
    if (!std::isfinite(v)) throw InvalidArgument("view_grid: angles must be finite");
  }
  if (a[0] == a[1] || a[0] == a[2] || a[1] == a[2]) throw InvalidArgument("view_grid: angles must be distinct");
  std::vector<RotationAngles> grid;
  grid.reserve(27);
  for (const double x : a) {
    for (const double y : a) {
      for (const double z : a) grid.push_back({x, y, z});
    }
  }
  return grid;
}

std::array<double, 3> default_view_angles() {
  return {-std::numbers::pi / 6.0, 0.0, std::numbers::pi / 6.0};
}

Projection project_camera_point(const Eigen::Vector3d& p, const CameraModel& cam) {
  Projection out;
  out.depth = p.z();
  if (!(p.z() > 0.0)) return out;
  out.u = cam.cx + cam.fx * p.x() / p.z();
  out.v = cam.cy + cam.fy * p.y() / p.z();
  out.visible = std::isfinite(out.u) && std::isfinite(out.v);
  return out;
}

std::vector<Projection> project_points(const PointCloudGrid& cloud, const CameraModel& cam) {
  std::vector<Projection> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.valid[i]) continue;
    const Eigen::Vector3d p = cam.extrinsic.rotation * cloud.points[i] + cam.extrinsic.translation;
    out[i] = project_camera_point(p, cam);
  }
  return out;
}

PointCloudGrid center_cloud(const PointCloudGrid& cloud) {
  PointCloudGrid out = cloud;
  const Eigen::Vector3d c = cloud.centroid();
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (out.valid[i]) out.points[i] -= c;
  }
  return out;
}

namespace {

// Fits target = offset + slope * ratio; returns false when ratio has no spread.
bool fit_line(const std::vector<double>& ratio, const std::vector<double>& target, double& slope, double& offset) {
  const double n = static_cast<double>(ratio.size());
  if (ratio.size() < 2) return false;
  double mr = 0, mt = 0;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    mr += ratio[i];
    mt += target[i];
  }
  mr /= n;
  mt /= n;
  double srr = 0, srt = 0;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    srr += (ratio[i] - mr) * (ratio[i] - mr);
    srt += (ratio[i] - mr) * (target[i] - mt);
  }
  if (!(srr > 1e-18)) return false;
  slope = srt / srr;
  offset = mt - slope * mr;
  return slope > 0.0 && std::isfinite(slope) && std::isfinite(offset);
}

}  // namespace

CameraModel fit_grid_camera(const PointCloudGrid& cloud) {
  std::vector<double> xr, cols, yr, rows;
  for (int r = 0; r < cloud.height; ++r) {
    for (int c = 0; c < cloud.width; ++c) {
      const std::size_t i = cloud.index(r, c);
      if (!cloud.valid[i] || !(cloud.points[i].z() > 0.0)) continue;
      xr.push_back(cloud.points[i].x() / cloud.points[i].z());
      cols.push_back(c);
      yr.push_back(cloud.points[i].y() / cloud.points[i].z());
      rows.push_back(r);
    }
  }
  CameraModel cam;
  const bool ok_x = fit_line(xr, cols, cam.fx, cam.cx);
  const bool ok_y = fit_line(yr, rows, cam.fy, cam.cy);
  if (!ok_x || !ok_y) {
    const double f = std::max(cloud.height, cloud.width);
    cam.fx = cam.fy = f;
    cam.cx = (cloud.width - 1) / 2.0;
    cam.cy = (cloud.height - 1) / 2.0;
  }
  return cam;
}

}  // namespace mvfsad
