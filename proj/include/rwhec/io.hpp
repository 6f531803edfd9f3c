#pragma once

// Plain-text dataset formats, the manifest reader, report emission, and the
// batch driver behind the CLI.
//
// Formats (all numbers printed with 17 significant digits, so files
// round-trip byte-identically):
//   HTM           4 lines x 4 numbers, row-major; final row "0 0 0 1"
//   intrinsics    line 1: fx fy cx cy; line 2: k1 k2 p1 p2 k3 k4 k5 k6
//   target        line 1: m; then m lines "x y z"
//   observations  CSV, header "camera,pose,point,u,v"
//   manifest      line-oriented key=value; "camera.id=" opens a camera block

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rwhec/calib_reproj.hpp"
#include "rwhec/metrics.hpp"
#include "rwhec/simulate.hpp"

namespace rwhec {

namespace fs = std::filesystem;

void write_htm(const fs::path& path, const HTM& h);
HTM read_htm(const fs::path& path);

void write_intrinsics(const fs::path& path, const CameraIntrinsics& k);
CameraIntrinsics read_intrinsics(const fs::path& path);

void write_target(const fs::path& path, const TargetModel& t);
TargetModel read_target(const fs::path& path);

void write_observations(const fs::path& path, int camera_id,
                        const std::vector<Observation>& obs);
/// Reads rows whose camera column matches camera_id.
std::vector<Observation> read_observations(const fs::path& path, int camera_id);

struct ManifestCamera {
  int id = 0;
  std::string intrinsics_file;    // optional
  std::string a_pose_pattern;     // optional, printf-style %d pattern
  std::string observations_file;  // optional
  std::vector<int> visibility;    // empty -> all poses
};

struct DatasetManifest {
  fs::path root;
  int n_poses = 0;
  std::string b_pose_pattern;
  std::string target_file;  // optional
  std::string units;        // note only
  std::vector<ManifestCamera> cameras;
};

DatasetManifest read_manifest(const fs::path& path);
void write_manifest(const fs::path& path, const DatasetManifest& m);

/// Build the calibration problem a manifest describes.  When a camera has
/// no A pose files but ships observations and intrinsics, its A poses are
/// reconstructed by single-view planar pose estimation.
CalibProblem load_dataset(const fs::path& manifest_path);

void dump_sim_dataset(const fs::path& dir, const SimDataset& ds);
void dump_camera_dataset(const fs::path& dir, const SynthCameraDataset& ds);

struct RunConfig {
  std::vector<Method> methods;
  std::vector<RotationKind> rotations;
  SolverOptions solver_options;
  fs::path output_dir;
  bool parallel_cells = false;  // run (method, rotation) cells concurrently
};

struct RunEntry {
  Method method;
  RotationKind rotation;
  bool ok = false;
  std::string error;  // when !ok
  CalibResult result;
  std::optional<std::vector<CameraIntrinsics>> refined_intrinsics;
  MetricsReport metrics;
};

/// Execute every (method, rotation) pair on the problem, compute metrics,
/// and write the CSV report plus one HTM file per estimated transform.
/// Individual failures are recorded; throws only when nothing succeeds.
std::vector<RunEntry> run_methods(const RunConfig& config,
                                  const CalibProblem& problem);

std::string report_csv_header(int n_cameras);
void write_report_csv(const fs::path& path, const std::vector<RunEntry>& rows,
                      int n_cameras);

void write_sweep_csv(const fs::path& path, const SweepReport& report);
void write_sweep_means_csv(const fs::path& path,
                           const std::vector<SweepMeanRow>& means);

Method method_from_name(const std::string& name);
RotationKind rotation_from_name(const std::string& name);

}  // namespace rwhec
