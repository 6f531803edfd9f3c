// Timing comparison of the OpenMP kernels against the serial reference:
// finite-difference Jacobians, reprojection-error evaluation, the eta
// sweep, and batch triangulation.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "rwhec/calib_reproj.hpp"
#include "rwhec/metrics.hpp"
#include "rwhec/nlls.hpp"
#include "rwhec/parallel.hpp"
#include "rwhec/simulate.hpp"

namespace {

using namespace rwhec;

double time_once(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(const std::string& name, double serial_s, double parallel_s) {
  std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %5.2fx\n",
              name.c_str(), serial_s, parallel_s,
              parallel_s > 0 ? serial_s / parallel_s : 0.0);
}

void compare(const std::string& name, const std::function<void()>& fn) {
  set_parallel_enabled(false);
  const double serial_s = time_once(fn);
  set_parallel_enabled(true);
  const double parallel_s = time_once(fn);
  report(name, serial_s, parallel_s);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", []() {
    set_parallel_enabled(true);
    return parallel_threads();
  }());

  // Large reprojection problem: 60 poses, 14x20 board.
  const TargetModel board = make_chessboard(14, 20, 10.0);
  CameraIntrinsics k;
  k.fx = 1200.0;
  k.fy = 1180.0;
  k.cx = 640.0;
  k.cy = 480.0;
  k.dist = {0.05, -0.02, 0.001, -0.001, 0.002, 0.01, -0.005, 0.001};
  std::mt19937_64 rng(7);
  const HTM truth_x{random_rotation(rng), Vec3(120.0, -40.0, 60.0)};
  const HTM truth_z{random_rotation(rng), Vec3(15.0, 25.0, 80.0)};
  const SynthCameraDataset ds =
      synth_camera_dataset(60, board, k, truth_x, truth_z, 0.3, 11);

  // Jacobian of the rp1 objective at the c2 seed.
  {
    set_parallel_enabled(true);
    const CalibResult seed =
        solve_c2_simultaneous(ds.problem, RotationKind::AxisAngle);
    const HTM xt = inverse(seed.x);
    LeastSquaresProblem lsq;
    VecX p0(12);
    p0.head<3>() = param_from_rot(xt.r, RotationKind::AxisAngle).p;
    p0.segment<3>(3) = xt.t;
    p0.segment<3>(6) = param_from_rot(seed.z[0].r, RotationKind::AxisAngle).p;
    p0.tail<3>() = seed.z[0].t;
    lsq.initial_params = p0;
    const auto& problem = ds.problem;
    lsq.residual_fn = [&problem, &k](const VecX& p) {
      const HTM xtilde{
          rot_from_param({RotationKind::AxisAngle, p.head<3>(), false}),
          p.segment<3>(3)};
      const HTM z{
          rot_from_param({RotationKind::AxisAngle, p.segment<3>(6), false}),
          p.tail<3>()};
      const auto& cam = problem.cameras.front();
      VecX r(2 * cam.observations.size());
      int idx = 0;
      for (const auto& obs : cam.observations) {
        const Vec2 proj =
            project_chain(k, z, problem.b_poses[obs.pose], xtilde,
                          problem.target.points[obs.point]);
        r[idx++] = obs.uv.x() - proj.x();
        r[idx++] = obs.uv.y() - proj.y();
      }
      return r;
    };
    const VecX r0 = lsq.residual_fn(p0);
    compare("jacobian (reprojection)", [&] {
      for (int rep = 0; rep < 20; ++rep) jacobian(lsq.residual_fn, p0, r0);
    });
  }

  // Reprojection error evaluation.
  {
    std::vector<CameraIntrinsics> ks{k};
    compare("compute_rsse", [&] {
      for (int rep = 0; rep < 2000; ++rep)
        compute_rsse(ds.truth_x, {ds.truth_z}, ks, ds.problem);
    });
  }

  // Batch triangulation via the reconstruction-accuracy metric.
  {
    std::vector<CameraIntrinsics> ks{k};
    compare("rae (triangulation batch)", [&] {
      rae(ds.truth_x, {ds.truth_z}, ks, ds.problem);
    });
  }

  // Full eta sweep with the simultaneous solvers.
  {
    SimConfig cfg;
    cfg.n_poses = 25;
    cfg.trials = 10;
    cfg.seed = 3;
    compare("sweep (c1-sim, euler)", [&] {
      run_sweep(cfg, {Method::C1Sim}, {RotationKind::EulerXYZ});
    });
  }

  set_parallel_enabled(true);
  return 0;
}
