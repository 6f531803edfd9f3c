#pragma once

// Class-1 solvers: iterative minimization of the algebraic discrepancy
// between A*X and Z*B, in the cost-function variants
//   c1 = sum ||A_i X - Z_d B_i||_F^2
//   c2 = sum ||A_i - Z_d B_i X^-1||_F^2
// each available as one joint minimization (simultaneous) or as a rotation
// stage followed by a closed-form linear translation stage (separable).
// Multi-camera problems weight camera d by w_d = min_s / |S_d|.

#include "rwhec/problem.hpp"

namespace rwhec {

enum class CostClass1 { C1, C2 };

CalibResult solve_c1_simultaneous(const CalibProblem& problem,
                                  RotationKind kind,
                                  const SolverOptions& options = {});
CalibResult solve_c1_separable(const CalibProblem& problem, RotationKind kind,
                               const SolverOptions& options = {});
CalibResult solve_c2_simultaneous(const CalibProblem& problem,
                                  RotationKind kind,
                                  const SolverOptions& options = {});
CalibResult solve_c2_separable(const CalibProblem& problem, RotationKind kind,
                               const SolverOptions& options = {});

/// Weighted objective value at the given (X, Z): exact evaluation of the
/// c1 or c2 cost, no optimization.
double evaluate_cost(const CalibResult& result, const CalibProblem& problem,
                     CostClass1 which);

}  // namespace rwhec
