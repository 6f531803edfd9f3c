#pragma once

// Pinhole camera with rational radial plus tangential distortion, and the
// planar calibration-target geometry.

#include <array>
#include <vector>

#include "rwhec/se3.hpp"

namespace rwhec {

/// 12-parameter camera: fx, fy, cx, cy plus 8 distortion coefficients in
/// the order (k1, k2, p1, p2, k3, k4, k5, k6).
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  std::array<double, 8> dist{};
};

/// Calibration-object points in the world frame, millimeters.
struct TargetModel {
  std::vector<Vec3> points;
};

/// One detected target point: robot pose index, target point index, pixel.
struct Observation {
  int pose = 0;
  int point = 0;
  Vec2 uv = Vec2::Zero();
};

/// Project a camera-frame point to pixels.  Radial factor is the rational
/// model (1 + k1 r^2 + k2 r^4 + k3 r^6) / (1 + k4 r^2 + k5 r^4 + k6 r^6)
/// with the usual tangential terms.  Throws PointBehindCamera for
/// z <= 1e-9.
Vec2 project(const CameraIntrinsics& k, const Vec3& point_cam);

/// Project a world point through the chain Z * B * X̃ (X̃ standing for
/// X⁻¹), i.e. the upper 3x4 of the composed transform applied to the
/// homogeneous target point, then through the camera model.
Vec2 project_chain(const CameraIntrinsics& k, const HTM& z, const HTM& b,
                   const HTM& xtilde, const Vec3& target_point);

/// Planar chessboard corners: rows x cols points, z = 0, row-major with
/// x = col * square_mm and y = row * square_mm.
TargetModel make_chessboard(int rows, int cols, double square_mm);

/// Invert the distortion model: pixel -> normalized image coordinates.
/// Fixed-point iteration, exact for zero distortion.
Vec2 undistort_normalized(const CameraIntrinsics& k, const Vec2& uv);

}  // namespace rwhec
