#pragma once

// Class-2 solvers: minimize camera reprojection error over (X, Z_d), with
// intrinsics held fixed (rp1) or refined jointly (rp2).  rp1 is seeded by
// the simultaneous c2 solution; rp2 is seeded by rp1.

#include <optional>

#include "rwhec/calib_axzb.hpp"

namespace rwhec {

struct RsseReport {
  double rsse = 0.0;                     // total, pixels^2
  std::vector<double> rsse_per_camera;   // pixels^2
  std::vector<double> rrmse_per_camera;  // sqrt(rsse_d / |obs_d|), pixels
  bool behind_camera = false;  // a sentinel term entered the evaluation
};

struct ReprojResult {
  CalibResult base;
  std::optional<std::vector<CameraIntrinsics>> refined_intrinsics;  // rp2
  double rsse = 0.0;
  std::vector<double> rrmse_per_camera;
};

ReprojResult solve_rp1(const CalibProblem& problem, RotationKind kind,
                       const SolverOptions& options = {});
ReprojResult solve_rp2(const CalibProblem& problem, RotationKind kind,
                       const SolverOptions& options = {});

/// Pure evaluation of the reprojection error over all observations.
/// Points behind a camera contribute the sentinel term and set the flag.
/// Internally parallel over observations with a fixed summation order.
RsseReport compute_rsse(const HTM& x, const std::vector<HTM>& z,
                        const std::vector<CameraIntrinsics>& k,
                        const CalibProblem& problem);

}  // namespace rwhec
