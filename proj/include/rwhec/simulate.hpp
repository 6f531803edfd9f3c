#pragma once

// Ground-truth dataset generation: random pose sets with B_i = Z^-1 A_i X,
// quaternion rotation noise on B_i, eta sweeps over solver rosters, and a
// synthetic camera pipeline producing image observations for the
// reprojection solvers.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rwhec/metrics.hpp"
#include "rwhec/problem.hpp"

namespace rwhec {

enum class TranslationScale { Unit, Millimeter };

struct SimConfig {
  int n_poses = 25;
  TranslationScale scale = TranslationScale::Unit;
  double eta = 0.0;  // quaternion noise magnitude, in [0, 0.25]
  std::uint64_t seed = 0;
  int trials = 10;
};

struct SimDataset {
  std::vector<HTM> a_poses;
  std::vector<HTM> b_poses;
  HTM truth_x;
  HTM truth_z;
  SimConfig config;
};

/// Rotation uniform on SO(3) (normalized 4-Gaussian quaternion).
Mat3 random_rotation(std::mt19937_64& rng);

/// Perturb a rotation in quaternion space: componentwise Uniform(-eta, eta)
/// added to the unit quaternion, then renormalized.
Mat3 add_quaternion_noise(const Mat3& r, double eta, std::mt19937_64& rng);

/// Draw A_i, X, Z with uniform rotations and uniform translations in the
/// configured interval, derive B_i = Z^-1 A_i X, then apply rotation noise
/// of magnitude eta to each B_i.  Deterministic per seed.
SimDataset generate(const SimConfig& config);

/// View of the dataset as a single-camera CalibProblem (A poses only).
CalibProblem to_problem(const SimDataset& ds);

/// Noise grid used by the sweep: eta_k = 0.25 k / 19, k = 1..19.
std::vector<double> sweep_eta_grid();

struct SweepRow {
  Method method = Method::C1Sim;
  RotationKind rotation = RotationKind::EulerXYZ;
  double eta = 0.0;
  int trial = 0;
  SimErrors errors;
  double time_s = 0.0;
  bool failed = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // ordered by (eta, trial, method, rotation)
};

struct SweepMeanRow {
  Method method;
  RotationKind rotation;
  double eta;
  SimErrors mean;  // over non-failed trials
  int trials_ok;
};

/// Run every (eta, trial) cell of the grid through the given class-1
/// solvers.  Cells are independent and execute in parallel; rows are
/// gathered in deterministic order.  Solver failures are recorded, not
/// raised.
SweepReport run_sweep(const SimConfig& base, const std::vector<Method>& methods,
                      const std::vector<RotationKind>& rotations);

std::vector<SweepMeanRow> sweep_means(const SweepReport& report);

struct SynthCameraDataset {
  CalibProblem problem;  // single camera, full visibility
  HTM truth_x;
  HTM truth_z;
};

/// Synthetic image pipeline: camera poses sampled to keep the whole target
/// in front of the camera, A_i = Z B_i X^-1 held exactly, observations from
/// the projection chain plus isotropic Gaussian pixel noise.  Throws
/// GeometryError when pose sampling cannot satisfy visibility.
SynthCameraDataset synth_camera_dataset(int n_poses, const TargetModel& target,
                                        const CameraIntrinsics& k,
                                        const HTM& truth_x, const HTM& truth_z,
                                        double pixel_noise_sigma,
                                        std::uint64_t seed);

/// Deterministic per-cell RNG stream seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace rwhec
