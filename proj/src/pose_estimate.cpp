#include "rwhec/pose_estimate.hpp"

#include <cmath>

#include "rwhec/nlls.hpp"

namespace rwhec {

namespace {

// Hartley-normalized DLT homography mapping plane (x, y) to normalized
// image coordinates.
Mat3 homography_dlt(const std::vector<Vec2>& src, const std::vector<Vec2>& dst) {
  const int n = static_cast<int>(src.size());

  auto normalizer = [](const std::vector<Vec2>& pts) {
    Vec2 mean = Vec2::Zero();
    for (const auto& p : pts) mean += p;
    mean /= pts.size();
    double scale = 0.0;
    for (const auto& p : pts) scale += (p - mean).norm();
    scale = pts.size() * std::sqrt(2.0) / std::max(scale, 1e-12);
    Mat3 t = Mat3::Identity();
    t(0, 0) = t(1, 1) = scale;
    t(0, 2) = -scale * mean.x();
    t(1, 2) = -scale * mean.y();
    return t;
  };
  const Mat3 ts = normalizer(src);
  const Mat3 td = normalizer(dst);

  MatX a(2 * n, 9);
  for (int i = 0; i < n; ++i) {
    const Vec3 s = ts * Vec3(src[i].x(), src[i].y(), 1.0);
    const Vec3 d = td * Vec3(dst[i].x(), dst[i].y(), 1.0);
    a.row(2 * i) << -s.x(), -s.y(), -1, 0, 0, 0, d.x() * s.x(), d.x() * s.y(),
        d.x();
    a.row(2 * i + 1) << 0, 0, 0, -s.x(), -s.y(), -1, d.y() * s.x(),
        d.y() * s.y(), d.y();
  }
  Eigen::JacobiSVD<MatX> svd(a, Eigen::ComputeFullV);
  const VecX h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8];
  return td.inverse() * hn * ts;
}

// Pose seed from H ~ [r1 r2 t] with the nearest-rotation projection.
HTM pose_from_homography(const Mat3& h_in) {
  Mat3 h = h_in;
  const double s = std::sqrt(h.col(0).norm() * h.col(1).norm());
  if (s < 1e-12) throw ExtrinsicsError("degenerate homography scale");
  h /= s;
  if (h(2, 2) < 0) h = -h;  // target in front of the camera

  Mat3 r;
  r.col(0) = h.col(0);
  r.col(1) = h.col(1);
  r.col(2) = h.col(0).cross(h.col(1));
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 rot = svd.matrixU() * svd.matrixV().transpose();
  if (rot.determinant() < 0) {
    Mat3 v = svd.matrixV();
    v.col(2) *= -1.0;
    rot = svd.matrixU() * v.transpose();
  }
  return HTM{rot, h.col(2)};
}

}  // namespace

HTM estimate_planar_pose(const TargetModel& target,
                         const std::vector<Observation>& detections,
                         const CameraIntrinsics& k) {
  if (detections.size() < 4)
    throw ExtrinsicsError("planar pose needs at least 4 detections");
  std::vector<Vec2> plane, norm_img;
  std::vector<Vec3> world;
  std::vector<Vec2> pixels;
  for (const auto& obs : detections) {
    if (obs.point < 0 || obs.point >= static_cast<int>(target.points.size()))
      throw ExtrinsicsError("detection references an unknown target point");
    const Vec3& p = target.points[obs.point];
    if (std::abs(p.z()) > 1e-9)
      throw ExtrinsicsError("planar pose estimation requires a z = 0 target");
    plane.emplace_back(p.x(), p.y());
    norm_img.push_back(undistort_normalized(k, obs.uv));
    world.push_back(p);
    pixels.push_back(obs.uv);
  }

  const HTM seed = pose_from_homography(homography_dlt(plane, norm_img));

  // Refine the 6-dof pose against the full distortion model in pixel space.
  const RotationParam seed_rot = param_from_rot(seed.r, RotationKind::AxisAngle);
  VecX p0(6);
  p0.head<3>() = seed_rot.p;
  p0.tail<3>() = seed.t;

  LeastSquaresProblem lsq;
  lsq.initial_params = p0;
  lsq.residual_fn = [&world, &pixels, &k](const VecX& p) {
    const Mat3 r = rot_from_param(
        RotationParam{RotationKind::AxisAngle, p.head<3>(), false});
    const Vec3 t = p.tail<3>();
    VecX resid(2 * world.size());
    for (size_t i = 0; i < world.size(); ++i) {
      const Vec3 pc = r * world[i] + t;
      if (pc.z() <= 1e-9) {
        resid[2 * i] = 1e6;
        resid[2 * i + 1] = 1e6;
        continue;
      }
      const Vec2 proj = project(k, pc);
      resid[2 * i] = pixels[i].x() - proj.x();
      resid[2 * i + 1] = pixels[i].y() - proj.y();
    }
    return resid;
  };
  const LMResult lm = solve_lm(lsq);
  const Mat3 r = rot_from_param(
      RotationParam{RotationKind::AxisAngle, lm.params.head<3>(), false});
  return HTM{r, lm.params.tail<3>()};
}

}  // namespace rwhec
