#include <doctest.h>

#include <random>

#include "rwhec/calib_reproj.hpp"
#include "rwhec/metrics.hpp"
#include "rwhec/nlls.hpp"
#include "rwhec/parallel.hpp"
#include "rwhec/simulate.hpp"
#include "support.hpp"

using namespace rwhec;

namespace {

struct ParallelGuard {
  ~ParallelGuard() { set_parallel_enabled(true); }
};

SynthCameraDataset small_camera_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CameraIntrinsics k;
  k.fx = 1000.0;
  k.fy = 1000.0;
  k.cx = 640.0;
  k.cy = 480.0;
  k.dist = {0.02, -0.01, 0.0005, -0.0005, 0.001, 0.0, 0.0, 0.0};
  const HTM truth_x{random_rotation(rng), Vec3(90.0, -25.0, 45.0)};
  const HTM truth_z{random_rotation(rng), Vec3(12.0, 18.0, 55.0)};
  return synth_camera_dataset(10, make_chessboard(5, 6, 10.0), k, truth_x,
                              truth_z, 0.25, seed);
}

}  // namespace

TEST_CASE("parallel jacobian is bitwise identical to the serial reference") {
  ParallelGuard guard;
  const SynthCameraDataset ds = small_camera_dataset(404);
  const auto& cam = ds.problem.cameras[0];
  const auto& problem = ds.problem;

  ResidualFn fn = [&problem, &cam](const VecX& p) {
    const HTM xtilde{
        rot_from_param({RotationKind::AxisAngle, p.head<3>(), false}),
        p.segment<3>(3)};
    const HTM z{
        rot_from_param({RotationKind::AxisAngle, p.segment<3>(6), false}),
        p.tail<3>()};
    VecX r(2 * cam.observations.size());
    int idx = 0;
    for (const auto& obs : cam.observations) {
      const Vec2 proj =
          project_chain(cam.intrinsics, z, problem.b_poses[obs.pose], xtilde,
                        problem.target.points[obs.point]);
      r[idx++] = obs.uv.x() - proj.x();
      r[idx++] = obs.uv.y() - proj.y();
    }
    return r;
  };

  VecX p0(12);
  const HTM xt = inverse(ds.truth_x);
  p0.head<3>() = param_from_rot(xt.r, RotationKind::AxisAngle).p;
  p0.segment<3>(3) = xt.t;
  p0.segment<3>(6) = param_from_rot(ds.truth_z.r, RotationKind::AxisAngle).p;
  p0.tail<3>() = ds.truth_z.t;

  const VecX r0 = fn(p0);
  set_parallel_enabled(true);
  const MatX j_par = jacobian(fn, p0, r0);
  const MatX j_ser = jacobian_serial(fn, p0, r0);
  CHECK(j_par == j_ser);
}

TEST_CASE("solve_lm result does not depend on the parallel switch") {
  ParallelGuard guard;
  const auto gen = test::generated_problem(606, 12);
  set_parallel_enabled(true);
  const CalibResult a = solve_c1_simultaneous(gen.problem, RotationKind::Quaternion);
  set_parallel_enabled(false);
  const CalibResult b = solve_c1_simultaneous(gen.problem, RotationKind::Quaternion);
  CHECK((a.x.matrix() - b.x.matrix()).norm() == 0.0);
  CHECK((a.z[0].matrix() - b.z[0].matrix()).norm() == 0.0);
  CHECK(a.report.final_cost == b.report.final_cost);
  CHECK(a.report.cost_trace == b.report.cost_trace);
}

TEST_CASE("compute_rsse is bitwise stable across the switch") {
  ParallelGuard guard;
  const SynthCameraDataset ds = small_camera_dataset(707);
  const std::vector<CameraIntrinsics> ks{ds.problem.cameras[0].intrinsics};
  set_parallel_enabled(true);
  const RsseReport a = compute_rsse(ds.truth_x, {ds.truth_z}, ks, ds.problem);
  set_parallel_enabled(false);
  const RsseReport b = compute_rsse(ds.truth_x, {ds.truth_z}, ks, ds.problem);
  CHECK(a.rsse == b.rsse);
  CHECK(a.rrmse_per_camera == b.rrmse_per_camera);
}

TEST_CASE("rae is bitwise stable across the switch") {
  ParallelGuard guard;
  const SynthCameraDataset ds = small_camera_dataset(808);
  const std::vector<CameraIntrinsics> ks{ds.problem.cameras[0].intrinsics};
  set_parallel_enabled(true);
  const RaeReport a = rae(ds.truth_x, {ds.truth_z}, ks, ds.problem);
  set_parallel_enabled(false);
  const RaeReport b = rae(ds.truth_x, {ds.truth_z}, ks, ds.problem);
  CHECK(a.rae_mm == b.rae_mm);
  CHECK(a.rae_sq_mm2 == b.rae_sq_mm2);
}

TEST_CASE("sweep rows are identical with and without threading") {
  ParallelGuard guard;
  SimConfig cfg;
  cfg.n_poses = 8;
  cfg.trials = 2;
  cfg.seed = 909;
  set_parallel_enabled(true);
  const SweepReport a = run_sweep(cfg, {Method::C1Sim}, {RotationKind::EulerXYZ});
  set_parallel_enabled(false);
  const SweepReport b = run_sweep(cfg, {Method::C1Sim}, {RotationKind::EulerXYZ});
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].errors.e_rx == b.rows[i].errors.e_rx);
    CHECK(a.rows[i].errors.e_tz == b.rows[i].errors.e_tz);
    CHECK(a.rows[i].failed == b.rows[i].failed);
  }
}
