#pragma once

// Single-view pose of a planar target: homography decomposition seed plus
// reprojection-error LM refinement.  Supplies world->camera poses when a
// dataset ships corner detections but no A files.

#include "rwhec/camera.hpp"

namespace rwhec {

/// Estimate the world->camera pose from detections of a planar (z = 0)
/// target.  Throws ExtrinsicsError for fewer than 4 points, a non-planar
/// target, or a degenerate homography.
HTM estimate_planar_pose(const TargetModel& target,
                         const std::vector<Observation>& detections,
                         const CameraIntrinsics& k);

}  // namespace rwhec
