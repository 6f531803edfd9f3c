#include "rwhec/nlls.hpp"

#include <cmath>
#include <limits>

#include "rwhec/parallel.hpp"

namespace rwhec {

namespace {

constexpr double kFdEpsilon = 1e-7;
constexpr double kMaxDamping = 1e12;

// A residual that throws at a perturbed point counts as non-finite, so
// exceptions never cross the parallel region below.
VecX eval_or_nan(const ResidualFn& fn, const VecX& x, Eigen::Index rows) {
  try {
    return fn(x);
  } catch (const Error&) {
    return VecX::Constant(rows, std::numeric_limits<double>::quiet_NaN());
  }
}

// Column i of the forward-difference Jacobian; backward fallback when the
// forward point is non-finite.  Returns false when both sides fail.
bool fd_column(const ResidualFn& fn, const VecX& params, const VecX& r0,
               int i, Eigen::Ref<VecX> col) {
  const double h = kFdEpsilon * std::max(std::abs(params[i]), 1.0);
  VecX x = params;
  x[i] = params[i] + h;
  VecX rp = eval_or_nan(fn, x, r0.size());
  if (rp.size() == r0.size() && rp.allFinite()) {
    col = (rp - r0) / h;
    return true;
  }
  x[i] = params[i] - h;
  VecX rm = eval_or_nan(fn, x, r0.size());
  if (rm.size() == r0.size() && rm.allFinite()) {
    col = (r0 - rm) / h;
    return true;
  }
  return false;
}

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::FnTol: return "fn_tol";
    case Termination::ParamTol: return "param_tol";
    case Termination::GradTol: return "grad_tol";
    case Termination::MaxIter: return "max_iter";
    case Termination::Stalled: return "stalled";
  }
  return "?";
}

MatX jacobian_serial(const ResidualFn& fn, const VecX& params, const VecX& r0) {
  MatX j(r0.size(), params.size());
  for (int i = 0; i < params.size(); ++i) {
    if (!fd_column(fn, params, r0, i, j.col(i)))
      throw NonFiniteJacobian("non-finite residual in both difference directions, column " +
                              std::to_string(i));
  }
  return j;
}

MatX jacobian(const ResidualFn& fn, const VecX& params, const VecX& r0) {
  if (!parallel_enabled()) return jacobian_serial(fn, params, r0);
  MatX j(r0.size(), params.size());
  const int p = static_cast<int>(params.size());
  int bad_column = -1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < p; ++i) {
    if (!fd_column(fn, params, r0, i, j.col(i))) {
#ifdef _OPENMP
#pragma omp critical
#endif
      bad_column = i;
    }
  }
  if (bad_column >= 0)
    throw NonFiniteJacobian("non-finite residual in both difference directions, column " +
                            std::to_string(bad_column));
  return j;
}

MatX jacobian(const LeastSquaresProblem& problem, const VecX& params) {
  VecX r0 = problem.residual_fn(params);
  return jacobian(problem.residual_fn, params, r0);
}

LMResult solve_lm(const LeastSquaresProblem& problem,
                  const SolverOptions& options) {
  VecX x = problem.initial_params;
  VecX r = problem.residual_fn(x);
  if (!r.allFinite())
    throw InvalidStart("residual non-finite at the initial point");
  if (r.size() < x.size())
    throw InvalidStart("fewer residuals than parameters");

  double cost = r.squaredNorm();
  double lambda = options.initial_damping;

  SolverReport report;
  report.cost_trace.push_back(cost);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    report.iterations = iter;
    const MatX j = jacobian(problem.residual_fn, x, r);
    const VecX g = j.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      report.iterations = iter - 1;
      report.termination = Termination::GradTol;
      break;
    }
    const MatX jtj = j.transpose() * j;
    const VecX diag = jtj.diagonal();

    bool accepted = false;
    while (!accepted) {
      MatX damped = jtj;
      damped.diagonal() += lambda * diag;
      // Rank-revealing solve: gauge directions (zero curvature and zero
      // gradient, e.g. the quaternion norm) get a zero step instead of
      // poisoning the factorization.
      const VecX delta = Eigen::ColPivHouseholderQR<MatX>(damped).solve(-g);
      if (delta.allFinite()) {
        const VecX x_new = x + delta;
        const VecX r_new = eval_or_nan(problem.residual_fn, x_new, r.size());
        if (r_new.allFinite() && r_new.squaredNorm() < cost) {
          const double old_cost = cost;
          const double decrease = cost - r_new.squaredNorm();
          const double step_norm = delta.norm();
          x = x_new;
          r = r_new;
          cost = r_new.squaredNorm();
          report.cost_trace.push_back(cost);
          lambda = std::max(lambda / 10.0, 1e-32);
          accepted = true;
          if (decrease <= options.fn_tolerance * old_cost) {
            report.termination = Termination::FnTol;
            report.final_cost = cost;
            return {x, report};
          }
          if (step_norm <=
              options.param_tolerance * (x.norm() + options.param_tolerance)) {
            report.termination = Termination::ParamTol;
            report.final_cost = cost;
            return {x, report};
          }
          break;
        }
      }
      lambda *= 10.0;
      if (lambda > kMaxDamping) {
        report.termination = Termination::Stalled;
        report.final_cost = cost;
        return {x, report};
      }
    }
    if (iter == options.max_iterations)
      report.termination = Termination::MaxIter;
  }

  report.final_cost = cost;
  return {x, report};
}

}  // namespace rwhec
