#pragma once

// Internal parameter-vector layout shared by the calibration solvers:
// [p_X, t_X, p_Z0, t_Z0, ..., p_Z{q-1}, t_Z{q-1}, (k_0 ... k_{q-1})]
// where each rotation block has param_size(kind) entries and each optional
// intrinsics block has 12 (fx, fy, cx, cy, k1, k2, p1, p2, k3, k4, k5, k6).

#include "rwhec/camera.hpp"
#include "rwhec/se3.hpp"

namespace rwhec::detail {

struct Packing {
  RotationKind kind = RotationKind::EulerXYZ;
  int q = 1;                     // number of cameras
  bool with_intrinsics = false;  // rp2 layout

  int rot_len() const { return param_size(kind); }
  int pose_block() const { return rot_len() + 3; }
  int x_offset() const { return 0; }
  int z_offset(int d) const { return pose_block() * (1 + d); }
  int k_offset(int d) const { return pose_block() * (1 + q) + 12 * d; }
  int total() const {
    return pose_block() * (1 + q) + (with_intrinsics ? 12 * q : 0);
  }
};

inline VecX identity_rotation_param(RotationKind kind) {
  if (kind == RotationKind::Quaternion) {
    VecX p(4);
    p << 1, 0, 0, 0;
    return p;
  }
  return VecX::Zero(3);
}

inline HTM unpack_htm(const VecX& params, int offset, RotationKind kind) {
  RotationParam rp;
  rp.kind = kind;
  rp.p = params.segment(offset, param_size(kind));
  HTM h;
  h.r = rot_from_param(rp);
  h.t = params.segment(offset + param_size(kind), 3);
  return h;
}

inline void pack_intrinsics(const CameraIntrinsics& k, int offset, VecX& out) {
  out[offset + 0] = k.fx;
  out[offset + 1] = k.fy;
  out[offset + 2] = k.cx;
  out[offset + 3] = k.cy;
  for (int i = 0; i < 8; ++i) out[offset + 4 + i] = k.dist[i];
}

inline CameraIntrinsics unpack_intrinsics(const VecX& params, int offset) {
  CameraIntrinsics k;
  k.fx = params[offset + 0];
  k.fy = params[offset + 1];
  k.cx = params[offset + 2];
  k.cy = params[offset + 3];
  for (int i = 0; i < 8; ++i) k.dist[i] = params[offset + 4 + i];
  return k;
}

}  // namespace rwhec::detail
