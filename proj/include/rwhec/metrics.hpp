#pragma once

// Evaluation metrics: algebraic rotation/translation errors of the
// estimated (X, Z) against the pose data, reprojection rmse, triangulation
// based reconstruction accuracy, and ground-truth errors for simulation.
// Multi-camera problems pool the per-pose terms over all cameras.

#include <limits>

#include "rwhec/calib_reproj.hpp"
#include "rwhec/problem.hpp"

namespace rwhec {

struct MetricsReport {
  double e_r1 = 0.0;     // mean squared Frobenius rotation discrepancy
  double e_r2_deg = 0.0; // mean relative rotation angle, degrees
  double e_t_mm2 = 0.0;  // mean squared translation discrepancy, mm^2
  double e_c = 0.0;      // mean squared Frobenius discrepancy of A X - Z B
  std::vector<double> rrmse_per_camera;  // pixels; empty without observations
  double rae_mm = std::numeric_limits<double>::quiet_NaN();
  double rae_sq_mm2 = std::numeric_limits<double>::quiet_NaN();
  double runtime_s = 0.0;
};

double e_r1(const HTM& x, const std::vector<HTM>& z, const CalibProblem& p);
double e_r2(const HTM& x, const std::vector<HTM>& z, const CalibProblem& p);
double e_t(const HTM& x, const std::vector<HTM>& z, const CalibProblem& p);
double e_c(const HTM& x, const std::vector<HTM>& z, const CalibProblem& p);

/// Ground-truth errors for simulated data: Frobenius distance between
/// rotations and Euclidean distance between translations.
struct SimErrors {
  double e_rx = 0.0;
  double e_rz = 0.0;
  double e_tx = 0.0;
  double e_tz = 0.0;
};

SimErrors sim_errors(const HTM& est_x, const HTM& est_z, const HTM& true_x,
                     const HTM& true_z);

/// One sighting of a world point: world->camera pose, camera, pixel.
struct Sighting {
  HTM world_to_cam;
  CameraIntrinsics intrinsics;
  Vec2 uv = Vec2::Zero();
};

struct TriangulatedPoint {
  Vec3 point = Vec3::Zero();
  bool ill_conditioned = false;  // best ray pair separated by < 0.1 degree
};

/// Most-likely world point for a set of sightings: reprojection-error LM
/// seeded by midpoint triangulation of the two most widely separated rays.
/// Throws InsufficientViews for fewer than 2 sightings.
TriangulatedPoint triangulate_point(const std::vector<Sighting>& sightings);

struct RaeReport {
  double rae_mm = 0.0;      // mean unsquared distance
  double rae_sq_mm2 = 0.0;  // mean squared distance
  bool any_ill_conditioned = false;
};

/// Reconstruction accuracy: triangulate every target point from its
/// observations under the estimated calibration and compare with the
/// target geometry.  Per-point triangulations run in parallel.
RaeReport rae(const HTM& x, const std::vector<HTM>& z,
              const std::vector<CameraIntrinsics>& k, const CalibProblem& p);

/// Full report for one calibration result; reprojection and reconstruction
/// metrics are filled only when observations and intrinsics are available.
/// Pass `intrinsics` to evaluate with refined camera parameters.
MetricsReport compute_metrics(
    const HTM& x, const std::vector<HTM>& z, const CalibProblem& p,
    double runtime_s, const std::vector<CameraIntrinsics>* intrinsics = nullptr);

}  // namespace rwhec
