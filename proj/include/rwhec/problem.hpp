#pragma once

// Calibration problem and result containers shared by the algebraic and
// reprojection solvers.

#include <map>
#include <vector>

#include "rwhec/camera.hpp"
#include "rwhec/nlls.hpp"
#include "rwhec/se3.hpp"

namespace rwhec {

/// Per-camera data: world->camera poses A_i (when available), intrinsics,
/// corner detections, and the visibility set S_d of robot pose indices.
struct CameraData {
  int id = 0;
  std::map<int, HTM> a_poses;
  bool has_intrinsics = false;
  CameraIntrinsics intrinsics;
  std::vector<Observation> observations;
  std::vector<int> visibility;  // sorted, unique
};

struct CalibProblem {
  std::vector<HTM> b_poses;  // base->hand, one per robot pose
  std::vector<CameraData> cameras;
  TargetModel target;

  int n_poses() const { return static_cast<int>(b_poses.size()); }
  int n_cameras() const { return static_cast<int>(cameras.size()); }
};

enum class Method { C1Sim, C1Sep, C2Sim, C2Sep, RP1, RP2 };

const char* method_name(Method m);

struct CalibResult {
  HTM x;                // robot base -> world
  std::vector<HTM> z;   // hand -> camera, one per camera
  RotationKind rotation_kind = RotationKind::EulerXYZ;
  Method method = Method::C1Sim;
  SolverReport report;
};

/// Equal-influence camera weights w_d = min_s / |S_d|.
std::vector<double> camera_weights(const CalibProblem& problem);

/// Check the structural invariants (n >= 3, |S_d| >= 3, indices in range,
/// A poses present for every visible index).  Throws ConfigError.
void validate_problem(const CalibProblem& problem, bool require_a_poses);

}  // namespace rwhec
