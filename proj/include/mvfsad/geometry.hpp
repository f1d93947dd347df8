// Copyright (c) 2026, the mvfsad authors
// SPDX-License-Identifier: Apache-2.0
//
// Rotations, organized point clouds and pinhole projection.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace mvfsad {

struct RotationAngles {
  double theta_x = 0.0;
  double theta_y = 0.0;
  double theta_z = 0.0;

  friend bool operator==(const RotationAngles&, const RotationAngles&) = default;
};

/// Proper rotation (orthogonal, det +1).
struct Rot3 {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  static Rot3 identity() { return {}; }
};

/// Organized H x W grid of 3D points; invalid cells carry no measurement.
struct PointCloudGrid {
  int height = 0;
  int width = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<std::uint8_t> valid;

  PointCloudGrid() = default;
  PointCloudGrid(int h, int w);

  std::size_t size() const { return points.size(); }
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * width + col; }
  std::size_t valid_count() const;
  /// Mean of the valid points (zero if there are none).
  Eigen::Vector3d centroid() const;
};

/// Rigid transform applied before projection: p_cam = R p + t.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  RigidTransform extrinsic;

  /// Throws InvalidArgument unless focal lengths are positive and the
  /// extrinsic rotation is orthogonal.
  void validate() const;
  /// Copy with intrinsics rescaled for a canvas of a different resolution.
  CameraModel rescaled(double sx, double sy) const;
};

struct Projection {
  double u = 0.0;  // column coordinate
  double v = 0.0;  // row coordinate
  double depth = 0.0;
  bool visible = false;
};

/// The three-factor product, multiplied left to right in this order:
///   [ c_x  s_x 0 ; -s_x c_x 0 ; 0 0 1 ]
///   [ c_y  0  s_y ; 0 1 0 ; -s_y 0 c_y ]
///   [ 1 0 0 ; 0 c_z s_z ; 0 -s_z c_z ]
/// The first factor is labelled with theta_x even though it turns about z;
/// it is kept as written.
Rot3 rotation_matrix(const RotationAngles& angles);

/// Replaces every valid point p by R p; the validity mask is unchanged.
PointCloudGrid rotate_cloud(const PointCloudGrid& cloud, const Rot3& r);

/// All 27 angle triples of a 3-value grid, theta_x outermost, theta_z innermost.
std::vector<RotationAngles> view_grid(const std::array<double, 3>& per_axis_angles);

/// Default per-axis angles {-pi/6, 0, +pi/6}.
std::array<double, 3> default_view_angles();

/// Pinhole projection through the extrinsic transform. Invalid cells and
/// points with camera depth <= 0 are reported invisible.
std::vector<Projection> project_points(const PointCloudGrid& cloud, const CameraModel& cam);

/// Projection of a single camera-frame point (no extrinsic).
Projection project_camera_point(const Eigen::Vector3d& p_cam, const CameraModel& cam);

/// Copy of the cloud translated so the valid points have zero mean.
PointCloudGrid center_cloud(const PointCloudGrid& cloud);

/// Least-squares fit of pinhole intrinsics so that each valid grid cell
/// (row, col) projects back onto (row, col). Falls back to a frontal camera
/// with focal length max(H, W) when the fit is degenerate.
CameraModel fit_grid_camera(const PointCloudGrid& cloud);

}  // namespace mvfsad
