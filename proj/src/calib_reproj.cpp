#include "rwhec/calib_reproj.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "packing.hpp"
#include "rwhec/parallel.hpp"
#include "solver_chain.hpp"

namespace rwhec {

namespace {

using detail::Packing;

// Large finite residual so the line search retreats instead of aborting
// when a trial step puts a point behind the camera.
constexpr double kBehindSentinelPx = 1e6;

bool target_collinear(const TargetModel& target) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : target.points) mean += p;
  mean /= static_cast<double>(target.points.size());
  MatX centered(target.points.size(), 3);
  for (size_t i = 0; i < target.points.size(); ++i)
    centered.row(i) = (target.points[i] - mean).transpose();
  Eigen::JacobiSVD<MatX> svd(centered);
  return svd.singularValues()[1] < 1e-9 * (svd.singularValues()[0] + 1e-300);
}

void validate_reproj_inputs(const CalibProblem& problem) {
  validate_problem(problem, /*require_a_poses=*/false);
  if (problem.target.points.size() < 4)
    throw ConfigError("target needs at least 4 points");
  if (target_collinear(problem.target))
    throw ConfigError("target points are collinear");
  for (const auto& cam : problem.cameras) {
    if (!cam.has_intrinsics)
      throw ConfigError("camera " + std::to_string(cam.id) +
                        " has no intrinsics");
    if (cam.observations.empty())
      throw ConfigError("camera " + std::to_string(cam.id) +
                        " has no observations");
    std::set<std::pair<int, int>> seen;
    for (const auto& obs : cam.observations) {
      if (obs.pose < 0 || obs.pose >= problem.n_poses())
        throw ConfigError("observation pose index out of range");
      if (obs.point < 0 ||
          obs.point >= static_cast<int>(problem.target.points.size()))
        throw ConfigError("observation point index out of range");
      if (!seen.emplace(obs.pose, obs.point).second)
        throw ConfigError("duplicate observation of (pose " +
                          std::to_string(obs.pose) + ", point " +
                          std::to_string(obs.point) + ") in camera " +
                          std::to_string(cam.id));
    }
  }
}

int total_observations(const CalibProblem& problem) {
  int n = 0;
  for (const auto& cam : problem.cameras)
    n += static_cast<int>(cam.observations.size());
  return n;
}

// Reprojection residuals (delta-u, delta-v per observation, scaled by
// sqrt(w_d)).  The transform chain per observation is Z_d * B_i * X̃.
VecX reproj_residuals(const CalibProblem& problem,
                      const std::vector<double>& sqrt_w, const Packing& pk,
                      const VecX& params) {
  VecX resid(2 * total_observations(problem));
  const HTM xtilde = detail::unpack_htm(params, pk.x_offset(), pk.kind);
  int idx = 0;
  for (int d = 0; d < pk.q; ++d) {
    const auto& cam = problem.cameras[d];
    const HTM z = detail::unpack_htm(params, pk.z_offset(d), pk.kind);
    const CameraIntrinsics k =
        pk.with_intrinsics ? detail::unpack_intrinsics(params, pk.k_offset(d))
                           : cam.intrinsics;
    for (const auto& obs : cam.observations) {
      const HTM chain = compose(z, compose(problem.b_poses[obs.pose], xtilde));
      const Vec3 pc = chain.apply(problem.target.points[obs.point]);
      if (pc.z() <= 1e-9) {
        resid[idx++] = sqrt_w[d] * kBehindSentinelPx;
        resid[idx++] = sqrt_w[d] * kBehindSentinelPx;
        continue;
      }
      const Vec2 proj = project(k, pc);
      resid[idx++] = sqrt_w[d] * (obs.uv.x() - proj.x());
      resid[idx++] = sqrt_w[d] * (obs.uv.y() - proj.y());
    }
  }
  return resid;
}

std::vector<double> sqrt_weights(const CalibProblem& problem) {
  std::vector<double> w = camera_weights(problem);
  for (double& v : w) v = std::sqrt(v);
  return w;
}

ReprojResult finish(const CalibProblem& problem, const Packing& pk,
                    const LMResult& lm, Method method) {
  ReprojResult out;
  out.base.rotation_kind = pk.kind;
  out.base.method = method;
  out.base.report = lm.report;
  const HTM xtilde = detail::unpack_htm(lm.params, pk.x_offset(), pk.kind);
  out.base.x = inverse(xtilde);
  std::vector<CameraIntrinsics> ks;
  for (int d = 0; d < pk.q; ++d) {
    out.base.z.push_back(detail::unpack_htm(lm.params, pk.z_offset(d), pk.kind));
    ks.push_back(pk.with_intrinsics
                     ? detail::unpack_intrinsics(lm.params, pk.k_offset(d))
                     : problem.cameras[d].intrinsics);
  }
  if (pk.with_intrinsics) {
    for (const auto& k : ks)
      if (k.fx <= 0.0 || k.fy <= 0.0)
        throw NegativeFocal("refined focal length is not positive");
    out.refined_intrinsics = ks;
  }
  const RsseReport rsse = compute_rsse(out.base.x, out.base.z, ks, problem);
  out.rsse = rsse.rsse;
  out.rrmse_per_camera = rsse.rrmse_per_camera;
  for (double r : out.rrmse_per_camera)
    if (r > 1e4)
      throw ConvergenceFailure("reprojection rmse " + std::to_string(r) +
                               " px after optimization");
  return out;
}

}  // namespace

namespace {

// The raw rp1 solve, warm-started from the exact c2 parameter vector (the
// layouts coincide, both parameterize X̃ and the Z_d blocks).
LMResult solve_rp1_raw(const CalibProblem& problem, RotationKind kind,
                       const SolverOptions& options) {
  const LMResult seed = detail::solve_c2_sim_raw(problem, kind, options);
  const Packing pk{kind, problem.n_cameras(), false};
  const std::vector<double> sw = sqrt_weights(problem);
  LeastSquaresProblem lsq;
  lsq.initial_params = seed.params;
  lsq.residual_fn = [&problem, &sw, pk](const VecX& p) {
    return reproj_residuals(problem, sw, pk, p);
  };
  return solve_lm(lsq, options);
}

}  // namespace

ReprojResult solve_rp1(const CalibProblem& problem, RotationKind kind,
                       const SolverOptions& options) {
  validate_reproj_inputs(problem);
  const Packing pk{kind, problem.n_cameras(), false};
  return finish(problem, pk, solve_rp1_raw(problem, kind, options),
                Method::RP1);
}

ReprojResult solve_rp2(const CalibProblem& problem, RotationKind kind,
                       const SolverOptions& options) {
  validate_reproj_inputs(problem);
  const LMResult seed = solve_rp1_raw(problem, kind, options);

  const Packing pk{kind, problem.n_cameras(), true};
  VecX p0 = VecX::Zero(pk.total());
  p0.head(seed.params.size()) = seed.params;
  for (int d = 0; d < pk.q; ++d)
    detail::pack_intrinsics(problem.cameras[d].intrinsics, pk.k_offset(d), p0);

  const std::vector<double> sw = sqrt_weights(problem);
  LeastSquaresProblem lsq;
  lsq.initial_params = p0;
  lsq.residual_fn = [&problem, &sw, pk](const VecX& p) {
    return reproj_residuals(problem, sw, pk, p);
  };
  const LMResult lm = solve_lm(lsq, options);
  return finish(problem, pk, lm, Method::RP2);
}

RsseReport compute_rsse(const HTM& x, const std::vector<HTM>& z,
                        const std::vector<CameraIntrinsics>& k,
                        const CalibProblem& problem) {
  RsseReport report;
  const HTM xtilde = inverse(x);
  const int q = problem.n_cameras();
  for (int d = 0; d < q; ++d) {
    const auto& cam = problem.cameras[d];
    const int m = static_cast<int>(cam.observations.size());
    // Per-observation squared errors land in fixed slots so threading
    // cannot change the summation order below.
    std::vector<double> terms(m, 0.0);
    std::vector<unsigned char> behind(m, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel_enabled())
#endif
    for (int o = 0; o < m; ++o) {
      const auto& obs = cam.observations[o];
      const HTM chain = compose(z[d], compose(problem.b_poses[obs.pose], xtilde));
      const Vec3 pc = chain.apply(problem.target.points[obs.point]);
      if (pc.z() <= 1e-9) {
        terms[o] = 2.0 * kBehindSentinelPx * kBehindSentinelPx;
        behind[o] = 1;
      } else {
        terms[o] = (cam.observations[o].uv - project(k[d], pc)).squaredNorm();
      }
    }
    double rsse_d = 0.0;
    for (int o = 0; o < m; ++o) rsse_d += terms[o];
    for (int o = 0; o < m; ++o) report.behind_camera |= (behind[o] != 0);
    report.rsse_per_camera.push_back(rsse_d);
    report.rrmse_per_camera.push_back(m > 0 ? std::sqrt(rsse_d / m) : 0.0);
    report.rsse += rsse_d;
  }
  return report;
}

}  // namespace rwhec
