#include "rwhec/camera.hpp"

#include <cmath>

namespace rwhec {

namespace {

// Distorted normalized coordinates for ideal normalized (x, y).
Vec2 distort(const std::array<double, 8>& d, double x, double y) {
  const double r2 = x * x + y * y;
  const double r4 = r2 * r2;
  const double r6 = r4 * r2;
  const double k1 = d[0], k2 = d[1], p1 = d[2], p2 = d[3];
  const double k3 = d[4], k4 = d[5], k5 = d[6], k6 = d[7];
  const double rho =
      (1.0 + k1 * r2 + k2 * r4 + k3 * r6) / (1.0 + k4 * r2 + k5 * r4 + k6 * r6);
  const double xd = x * rho + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x);
  const double yd = y * rho + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y;
  return {xd, yd};
}

}  // namespace

Vec2 project(const CameraIntrinsics& k, const Vec3& point_cam) {
  if (point_cam.z() <= 1e-9)
    throw PointBehindCamera("point at or behind the image plane");
  const double x = point_cam.x() / point_cam.z();
  const double y = point_cam.y() / point_cam.z();
  const Vec2 d = distort(k.dist, x, y);
  return {k.fx * d.x() + k.cx, k.fy * d.y() + k.cy};
}

Vec2 project_chain(const CameraIntrinsics& k, const HTM& z, const HTM& b,
                   const HTM& xtilde, const Vec3& target_point) {
  const HTM chain = compose(z, compose(b, xtilde));
  return project(k, chain.apply(target_point));
}

TargetModel make_chessboard(int rows, int cols, double square_mm) {
  TargetModel target;
  target.points.reserve(static_cast<size_t>(rows) * cols);
  for (int row = 0; row < rows; ++row)
    for (int col = 0; col < cols; ++col)
      target.points.emplace_back(col * square_mm, row * square_mm, 0.0);
  return target;
}

Vec2 undistort_normalized(const CameraIntrinsics& k, const Vec2& uv) {
  const double x0 = (uv.x() - k.cx) / k.fx;
  const double y0 = (uv.y() - k.cy) / k.fy;
  double x = x0, y = y0;
  for (int it = 0; it < 20; ++it) {
    const double r2 = x * x + y * y;
    const double r4 = r2 * r2;
    const double r6 = r4 * r2;
    const auto& d = k.dist;
    const double rho = (1.0 + d[0] * r2 + d[1] * r4 + d[4] * r6) /
                       (1.0 + d[5] * r2 + d[6] * r4 + d[7] * r6);
    const double dx = 2.0 * d[2] * x * y + d[3] * (r2 + 2.0 * x * x);
    const double dy = d[2] * (r2 + 2.0 * y * y) + 2.0 * d[3] * x * y;
    x = (x0 - dx) / rho;
    y = (y0 - dy) / rho;
  }
  return {x, y};
}

}  // namespace rwhec
