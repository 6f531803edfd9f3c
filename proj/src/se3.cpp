#include "rwhec/se3.hpp"

#include <algorithm>
#include <cmath>

namespace rwhec {

int param_size(RotationKind kind) {
  return kind == RotationKind::Quaternion ? 4 : 3;
}

const char* rotation_kind_name(RotationKind kind) {
  switch (kind) {
    case RotationKind::EulerXYZ: return "euler";
    case RotationKind::AxisAngle: return "axis-angle";
    case RotationKind::Quaternion: return "quaternion";
  }
  return "?";
}

Mat4 HTM::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return m;
}

HTM HTM::from_matrix(const Mat4& m) {
  HTM h;
  h.r = m.topLeftCorner<3, 3>();
  h.t = m.topRightCorner<3, 1>();
  return h;
}

HTM compose(const HTM& a, const HTM& b) {
  return HTM{a.r * b.r, a.r * b.t + a.t};
}

HTM inverse(const HTM& a) {
  Mat3 rt = a.r.transpose();
  return HTM{rt, -(rt * a.t)};
}

Mat3 rot_from_param(const RotationParam& p) {
  switch (p.kind) {
    case RotationKind::EulerXYZ: {
      // Fixed-axis x, y, z: R = Rz * Ry * Rx acting on column vectors.
      return (Eigen::AngleAxisd(p.p[2], Vec3::UnitZ()) *
              Eigen::AngleAxisd(p.p[1], Vec3::UnitY()) *
              Eigen::AngleAxisd(p.p[0], Vec3::UnitX()))
          .toRotationMatrix();
    }
    case RotationKind::AxisAngle: {
      const double angle = p.p.norm();
      if (angle < 1e-12) return Mat3::Identity();
      return Eigen::AngleAxisd(angle, Vec3(p.p.head<3>()) / angle)
          .toRotationMatrix();
    }
    case RotationKind::Quaternion: {
      const double n = p.p.norm();
      if (n <= 1e-12)
        throw DegenerateParameter("quaternion norm below 1e-12");
      // Storage order (w, x, y, z); normalized here so the optimizer may
      // wander off the unit sphere.
      Eigen::Quaterniond q(p.p[0] / n, p.p[1] / n, p.p[2] / n, p.p[3] / n);
      return q.toRotationMatrix();
    }
  }
  return Mat3::Identity();
}

namespace {

// Unit quaternion (w, x, y, z) with w >= 0; ties broken toward a
// nonnegative first nonzero vector component.
Eigen::Vector4d quat_from_rot(const Mat3& r) {
  Eigen::Quaterniond q(r);
  Eigen::Vector4d v(q.w(), q.x(), q.y(), q.z());
  v.normalize();
  double sign = 0.0;
  for (int i = 0; i < 4 && sign == 0.0; ++i) {
    if (v[i] > 0) sign = 1.0;
    else if (v[i] < 0) sign = -1.0;
  }
  if (sign < 0) v = -v;
  return v;
}

}  // namespace

RotationParam param_from_rot(const Mat3& r, RotationKind kind) {
  RotationParam out;
  out.kind = kind;
  switch (kind) {
    case RotationKind::EulerXYZ: {
      out.p = VecX(3);
      const double s = -r(2, 0);  // sin of the middle angle
      if (std::abs(s) > 1.0 - 1e-12) {
        out.gimbal_lock = true;
        out.p[2] = 0.0;
        if (s > 0) {  // beta = +pi/2
          out.p[1] = M_PI / 2.0;
          out.p[0] = std::atan2(r(0, 1), r(0, 2));
        } else {  // beta = -pi/2
          out.p[1] = -M_PI / 2.0;
          out.p[0] = std::atan2(-r(0, 1), -r(0, 2));
        }
      } else {
        out.p[0] = std::atan2(r(2, 1), r(2, 2));
        out.p[1] = std::asin(std::clamp(s, -1.0, 1.0));
        out.p[2] = std::atan2(r(1, 0), r(0, 0));
      }
      return out;
    }
    case RotationKind::AxisAngle: {
      // Via the quaternion: with w >= 0 the angle lands in [0, pi].
      const Eigen::Vector4d q = quat_from_rot(r);
      const double vn = q.tail<3>().norm();
      out.p = VecX::Zero(3);
      if (vn > 1e-12) {
        const double angle = 2.0 * std::atan2(vn, q[0]);
        out.p = (q.tail<3>() / vn) * angle;
      }
      return out;
    }
    case RotationKind::Quaternion: {
      out.p = quat_from_rot(r);
      return out;
    }
  }
  return out;
}

double rotation_angle(const Mat3& r) {
  return std::acos(std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0));
}

bool is_rotation(const Mat3& m, double tol) {
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  return ortho < tol && std::abs(m.determinant() - 1.0) <= tol;
}

}  // namespace rwhec
