#include "rwhec/calib_axzb.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "packing.hpp"
#include "rwhec/parallel.hpp"
#include "solver_chain.hpp"

namespace rwhec {

namespace {

using detail::Packing;

// The Frobenius norm of a 4x4 difference whose bottom row cancels equals
// the norm of these 12 entries (upper 3x4 block, row-major).
void block_residual(const HTM& lhs, const HTM& rhs, double sqrt_w,
                    Eigen::Ref<VecX> out) {
  const Mat3 dr = lhs.r - rhs.r;
  const Vec3 dt = lhs.t - rhs.t;
  int idx = 0;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) out[idx++] = sqrt_w * dr(row, col);
    out[idx++] = sqrt_w * dt[row];
  }
}

int total_visible(const CalibProblem& problem) {
  int n = 0;
  for (const auto& cam : problem.cameras)
    n += static_cast<int>(cam.visibility.size());
  return n;
}

VecX initial_params(const Packing& pk) {
  VecX p = VecX::Zero(pk.total());
  const VecX rot0 = detail::identity_rotation_param(pk.kind);
  p.segment(pk.x_offset(), rot0.size()) = rot0;
  for (int d = 0; d < pk.q; ++d)
    p.segment(pk.z_offset(d), rot0.size()) = rot0;
  return p;
}

// Residuals of the simultaneous objectives; c2 parameterizes X̃ = X^-1.
VecX simultaneous_residuals(const CalibProblem& problem,
                            const std::vector<double>& sqrt_w,
                            const Packing& pk, CostClass1 which,
                            const VecX& params) {
  VecX resid(12 * total_visible(problem));
  const HTM x = detail::unpack_htm(params, pk.x_offset(), pk.kind);
  int idx = 0;
  for (int d = 0; d < pk.q; ++d) {
    const auto& cam = problem.cameras[d];
    const HTM z = detail::unpack_htm(params, pk.z_offset(d), pk.kind);
    for (int i : cam.visibility) {
      const HTM& a = cam.a_poses.at(i);
      const HTM& b = problem.b_poses[i];
      if (which == CostClass1::C1)
        block_residual(compose(a, x), compose(z, b), sqrt_w[d],
                       resid.segment(idx, 12));
      else
        block_residual(a, compose(z, compose(b, x)), sqrt_w[d],
                       resid.segment(idx, 12));
      idx += 12;
    }
  }
  return resid;
}

// Rotation-only residuals for the separable stage 1 (9 entries per pose).
VecX rotation_residuals(const CalibProblem& problem,
                        const std::vector<double>& sqrt_w, const Packing& pk,
                        CostClass1 which, const VecX& params) {
  VecX resid(9 * total_visible(problem));
  RotationParam rpx{pk.kind, params.segment(0, pk.rot_len()), false};
  const Mat3 rx = rot_from_param(rpx);
  int idx = 0;
  for (int d = 0; d < pk.q; ++d) {
    const auto& cam = problem.cameras[d];
    RotationParam rpz{pk.kind,
                      params.segment(pk.rot_len() * (1 + d), pk.rot_len()),
                      false};
    const Mat3 rz = rot_from_param(rpz);
    for (int i : cam.visibility) {
      const Mat3& ra = cam.a_poses.at(i).r;
      const Mat3& rb = problem.b_poses[i].r;
      const Mat3 diff = which == CostClass1::C1 ? Mat3(ra * rx - rz * rb)
                                                : Mat3(ra - rz * rb * rx);
      for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col)
          resid[idx++] = sqrt_w[d] * diff(row, col);
    }
  }
  return resid;
}

void check_convergence(const SolverReport& report, int n_poses) {
  if (report.termination == Termination::Stalled &&
      report.final_cost > 1e6 * n_poses)
    throw ConvergenceFailure("solver stalled at cost " +
                             std::to_string(report.final_cost));
}

// The algebraic costs are bilinear in the quaternions of X and Z, so
// spurious stationary points cluster near quaternion pairs orthogonal to
// the optimum (half a turn away).  Restarting from the three half-turn
// rotations for X and Z covers those basins; the identity pair runs first
// and the lowest final cost wins deterministically.
const std::array<Mat3, 4>& restart_rotations() {
  static const std::array<Mat3, 4> seeds = [] {
    std::array<Mat3, 4> s;
    s[0] = Mat3::Identity();
    s[1] = Eigen::AngleAxisd(M_PI, Vec3::UnitX()).toRotationMatrix();
    s[2] = Eigen::AngleAxisd(M_PI, Vec3::UnitY()).toRotationMatrix();
    s[3] = Eigen::AngleAxisd(M_PI, Vec3::UnitZ()).toRotationMatrix();
    return s;
  }();
  return seeds;
}

// Run LM from every (X flip, Z flip) rotation-seed pair and keep the best
// final cost.  The same flip is applied to every camera's Z.  Restarts are
// independent and run in parallel; selection order is fixed.
LMResult solve_multistart(
    const VecX& base_params, const ResidualFn& residual_fn,
    const SolverOptions& options,
    const std::function<void(const Mat3&, const Mat3&, VecX&)>& apply_seed) {
  const auto& seeds = restart_rotations();
  const int n_starts = 16;
  std::vector<LMResult> results(n_starts);
  std::vector<std::string> errors(n_starts);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel_enabled())
#endif
  for (int s = 0; s < n_starts; ++s) {
    VecX p0 = base_params;
    apply_seed(seeds[s / 4], seeds[s % 4], p0);
    try {
      results[s] = solve_lm({residual_fn, p0}, options);
    } catch (const Error& e) {
      errors[s] = e.what();
      results[s].report.final_cost =
          std::numeric_limits<double>::infinity();
    }
  }

  int best = -1;
  for (int s = 0; s < n_starts; ++s) {
    if (!errors[s].empty()) continue;
    if (best < 0 || results[s].report.final_cost <
                        results[best].report.final_cost)
      best = s;
  }
  if (best < 0) throw ConvergenceFailure("every restart failed: " + errors[0]);
  return results[best];
}

std::vector<double> sqrt_weights(const CalibProblem& problem) {
  std::vector<double> w = camera_weights(problem);
  for (double& v : w) v = std::sqrt(v);
  return w;
}

LMResult solve_simultaneous_raw(const CalibProblem& problem,
                                RotationKind kind, CostClass1 which,
                                const SolverOptions& options) {
  validate_problem(problem, /*require_a_poses=*/true);
  const Packing pk{kind, problem.n_cameras(), false};
  const std::vector<double> sw = sqrt_weights(problem);

  ResidualFn residual_fn = [&problem, &sw, pk, which](const VecX& p) {
    return simultaneous_residuals(problem, sw, pk, which, p);
  };
  auto apply_seed = [pk](const Mat3& rx, const Mat3& rz, VecX& p0) {
    const VecX px = param_from_rot(rx, pk.kind).p;
    const VecX pz = param_from_rot(rz, pk.kind).p;
    p0.segment(pk.x_offset(), px.size()) = px;
    for (int d = 0; d < pk.q; ++d)
      p0.segment(pk.z_offset(d), pz.size()) = pz;
  };
  LMResult lm =
      solve_multistart(initial_params(pk), residual_fn, options, apply_seed);
  check_convergence(lm.report, problem.n_poses());
  return lm;
}

CalibResult solve_simultaneous(const CalibProblem& problem, RotationKind kind,
                               CostClass1 which,
                               const SolverOptions& options) {
  const LMResult lm = solve_simultaneous_raw(problem, kind, which, options);
  const Packing pk{kind, problem.n_cameras(), false};

  CalibResult result;
  result.rotation_kind = kind;
  result.method = which == CostClass1::C1 ? Method::C1Sim : Method::C2Sim;
  result.report = lm.report;
  const HTM x = detail::unpack_htm(lm.params, pk.x_offset(), pk.kind);
  result.x = which == CostClass1::C1 ? x : inverse(x);
  for (int d = 0; d < pk.q; ++d)
    result.z.push_back(detail::unpack_htm(lm.params, pk.z_offset(d), pk.kind));
  return result;
}

// Stage 2 of the separable methods: the translation equations are linear
// once rotations are fixed, so they are solved in closed form.
//   c1:  R_A,i,d t_X - t_Z,d            = R_Z,d t_B,i - t_A,i,d
//   c2:  R_Z,d R_B,i t̃_X + t_Z,d       = t_A,i,d - R_Z,d t_B,i
// Unknowns stack as [t (X or X̃); t_Z,0; ...; t_Z,q-1].
VecX solve_translations(const CalibProblem& problem,
                        const std::vector<double>& sqrt_w,
                        const std::vector<Mat3>& rz, CostClass1 which) {
  const int q = problem.n_cameras();
  const int unknowns = 3 * (1 + q);
  MatX design = MatX::Zero(3 * total_visible(problem), unknowns);
  VecX rhs(design.rows());
  int row = 0;
  for (int d = 0; d < q; ++d) {
    const auto& cam = problem.cameras[d];
    for (int i : cam.visibility) {
      const HTM& a = cam.a_poses.at(i);
      const HTM& b = problem.b_poses[i];
      if (which == CostClass1::C1) {
        design.block<3, 3>(row, 0) = sqrt_w[d] * a.r;
        design.block<3, 3>(row, 3 * (1 + d)) =
            -sqrt_w[d] * Mat3::Identity();
        rhs.segment<3>(row) = sqrt_w[d] * (rz[d] * b.t - a.t);
      } else {
        design.block<3, 3>(row, 0) = sqrt_w[d] * (rz[d] * b.r);
        design.block<3, 3>(row, 3 * (1 + d)) = sqrt_w[d] * Mat3::Identity();
        rhs.segment<3>(row) = sqrt_w[d] * (a.t - rz[d] * b.t);
      }
      row += 3;
    }
  }

  Eigen::JacobiSVD<MatX> svd(design);
  const VecX& sv = svd.singularValues();
  if (sv.size() < unknowns || sv[unknowns - 1] < 1e-8 * sv[0])
    throw DegenerateMotion(
        "translation system is rank-deficient; robot poses do not determine "
        "the translations");
  return design.colPivHouseholderQr().solve(rhs);
}

CalibResult solve_separable(const CalibProblem& problem, RotationKind kind,
                            CostClass1 which, const SolverOptions& options) {
  validate_problem(problem, /*require_a_poses=*/true);
  const int q = problem.n_cameras();
  const Packing pk{kind, q, false};
  const std::vector<double> sw = sqrt_weights(problem);

  // Stage 1: rotations only.
  const int rl = pk.rot_len();
  VecX rot0 = VecX::Zero(rl * (1 + q));
  const VecX ident = detail::identity_rotation_param(kind);
  for (int blk = 0; blk <= q; ++blk) rot0.segment(rl * blk, rl) = ident;

  ResidualFn residual_fn = [&problem, &sw, pk, which](const VecX& p) {
    return rotation_residuals(problem, sw, pk, which, p);
  };
  auto apply_seed = [pk, rl, q](const Mat3& rx, const Mat3& rz, VecX& p0) {
    p0.segment(0, rl) = param_from_rot(rx, pk.kind).p;
    const VecX pz = param_from_rot(rz, pk.kind).p;
    for (int d = 0; d < q; ++d) p0.segment(rl * (1 + d), rl) = pz;
  };
  LMResult lm = solve_multistart(rot0, residual_fn, options, apply_seed);
  check_convergence(lm.report, problem.n_poses());

  RotationParam rpx{kind, lm.params.segment(0, rl), false};
  const Mat3 rx = rot_from_param(rpx);
  std::vector<Mat3> rz(q);
  for (int d = 0; d < q; ++d) {
    RotationParam rpz{kind, lm.params.segment(rl * (1 + d), rl), false};
    rz[d] = rot_from_param(rpz);
  }

  // Stage 2: closed-form translations.
  const VecX trans = solve_translations(problem, sw, rz, which);

  CalibResult result;
  result.rotation_kind = kind;
  result.method = which == CostClass1::C1 ? Method::C1Sep : Method::C2Sep;
  result.report = lm.report;
  HTM x{rx, trans.segment<3>(0)};
  result.x = which == CostClass1::C1 ? x : inverse(x);
  for (int d = 0; d < q; ++d)
    result.z.push_back(HTM{rz[d], trans.segment<3>(3 * (1 + d))});
  return result;
}

}  // namespace

CalibResult solve_c1_simultaneous(const CalibProblem& problem,
                                  RotationKind kind,
                                  const SolverOptions& options) {
  return solve_simultaneous(problem, kind, CostClass1::C1, options);
}

CalibResult solve_c1_separable(const CalibProblem& problem, RotationKind kind,
                               const SolverOptions& options) {
  return solve_separable(problem, kind, CostClass1::C1, options);
}

CalibResult solve_c2_simultaneous(const CalibProblem& problem,
                                  RotationKind kind,
                                  const SolverOptions& options) {
  return solve_simultaneous(problem, kind, CostClass1::C2, options);
}

CalibResult solve_c2_separable(const CalibProblem& problem, RotationKind kind,
                               const SolverOptions& options) {
  return solve_separable(problem, kind, CostClass1::C2, options);
}

namespace detail {

LMResult solve_c2_sim_raw(const CalibProblem& problem, RotationKind kind,
                          const SolverOptions& options) {
  return solve_simultaneous_raw(problem, kind, CostClass1::C2, options);
}

}  // namespace detail

double evaluate_cost(const CalibResult& result, const CalibProblem& problem,
                     CostClass1 which) {
  const std::vector<double> w = camera_weights(problem);
  const HTM& x = result.x;
  const HTM xtilde = inverse(x);
  double cost = 0.0;
  for (int d = 0; d < problem.n_cameras(); ++d) {
    const auto& cam = problem.cameras[d];
    const HTM& z = result.z[d];
    for (int i : cam.visibility) {
      const HTM& a = cam.a_poses.at(i);
      const HTM& b = problem.b_poses[i];
      HTM lhs, rhs;
      if (which == CostClass1::C1) {
        lhs = compose(a, x);
        rhs = compose(z, b);
      } else {
        lhs = a;
        rhs = compose(z, compose(b, xtilde));
      }
      cost += w[d] * ((lhs.r - rhs.r).squaredNorm() +
                      (lhs.t - rhs.t).squaredNorm());
    }
  }
  return cost;
}

}  // namespace rwhec
