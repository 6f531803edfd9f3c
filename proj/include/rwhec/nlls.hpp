#pragma once

// Dense Levenberg-Marquardt for small nonlinear least-squares problems.
// Damping follows the classic Marquardt schedule (x10 on rejection, /10 on
// acceptance) with lambda scaling the diagonal of JᵀJ, and Jacobians come
// from forward finite differences.  The Jacobian kernel has an
// OpenMP-parallel path over columns and a serial reference; both produce
// bitwise-identical matrices.

#include <functional>
#include <vector>

#include "rwhec/se3.hpp"

namespace rwhec {

using ResidualFn = std::function<VecX(const VecX&)>;

struct LeastSquaresProblem {
  ResidualFn residual_fn;
  VecX initial_params;
};

enum class Termination { FnTol, ParamTol, GradTol, MaxIter, Stalled };

const char* termination_name(Termination t);

struct SolverOptions {
  int max_iterations = 1000;
  double fn_tolerance = 1e-12;        // relative cost decrease
  double param_tolerance = 1e-12;     // relative step size
  double gradient_tolerance = 1e-12;  // max-norm of Jᵀr
  double initial_damping = 1e-3;
};

struct SolverReport {
  double final_cost = 0.0;
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  // Initial cost followed by each accepted step's cost; non-increasing.
  std::vector<double> cost_trace;
};

struct LMResult {
  VecX params;
  SolverReport report;
};

/// Forward-difference Jacobian, step h_i = 1e-7 * max(|x_i|, 1); falls back
/// to a backward difference per column when the forward-perturbed residual
/// is non-finite, and throws NonFiniteJacobian when both sides are.
/// Parallel over columns when OpenMP is enabled.
MatX jacobian(const ResidualFn& fn, const VecX& params, const VecX& r0);
MatX jacobian(const LeastSquaresProblem& problem, const VecX& params);

/// Serial reference for the kernel above; tests assert bitwise equality.
MatX jacobian_serial(const ResidualFn& fn, const VecX& params, const VecX& r0);

/// Minimize ‖residual_fn(x)‖².  Accepted-step costs are monotone
/// non-increasing; the damped normal equations are solved by a
/// rank-revealing QR.  Throws InvalidStart when the initial residual is
/// non-finite; a damping escalation past 1e12 terminates as Stalled.
LMResult solve_lm(const LeastSquaresProblem& problem,
                  const SolverOptions& options = {});

}  // namespace rwhec
