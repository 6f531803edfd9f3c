#pragma once

// Rotation parameterizations (Euler XYZ, axis-angle, quaternion),
// homogeneous transforms, and the conversions between them.

#include <Eigen/Dense>

#include "rwhec/errors.hpp"

namespace rwhec {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

enum class RotationKind { EulerXYZ, AxisAngle, Quaternion };

/// Parameter vector length for a rotation kind: 3, except 4 for quaternions.
int param_size(RotationKind kind);

const char* rotation_kind_name(RotationKind kind);

/// Tagged rotation parameter vector.  Euler angles and axis-angle use
/// radians; quaternions are stored scalar-first (w, x, y, z) and are
/// normalized on every conversion to a matrix.
struct RotationParam {
  RotationKind kind = RotationKind::EulerXYZ;
  VecX p;
  bool gimbal_lock = false;  // set by param_from_rot at the Euler singularity
};

/// Rigid transform: orthonormal rotation plus translation, bottom row
/// implicitly (0, 0, 0, 1).
struct HTM {
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Mat4 matrix() const;
  static HTM from_matrix(const Mat4& m);

  Vec3 apply(const Vec3& p) const { return r * p + t; }
};

HTM compose(const HTM& a, const HTM& b);
HTM inverse(const HTM& a);

/// Convert a parameter vector to a rotation matrix.
/// Euler XYZ composes as Rz(p2) * Ry(p1) * Rx(p0) (fixed-axis order x, y, z);
/// axis-angle applies Rodrigues' formula with angle = |p|; quaternions are
/// normalized first.  Throws DegenerateParameter for a quaternion with norm
/// below 1e-12.
Mat3 rot_from_param(const RotationParam& p);

/// Extract parameters reproducing r under rot_from_param.  Quaternions come
/// back unit-norm with nonnegative scalar part.  Euler extraction at gimbal
/// lock (|r(2,0)| beyond 1 - 1e-12) picks the branch with third angle zero
/// and sets the gimbal_lock flag.
RotationParam param_from_rot(const Mat3& r, RotationKind kind);

/// Rotation angle in [0, pi]: acos(clamp((trace - 1) / 2, -1, 1)).
double rotation_angle(const Mat3& r);

/// Orthonormality and properness check (‖RᵀR − I‖_F and det within tol).
bool is_rotation(const Mat3& m, double tol = 1e-9);

}  // namespace rwhec
