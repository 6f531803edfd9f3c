#pragma once

// Library-internal access to raw solver parameter vectors, so the rp1/rp2
// initialization chain can warm-start from the exact parameters the
// previous stage converged to (no matrix round trips between stages).

#include "rwhec/calib_axzb.hpp"

namespace rwhec::detail {

// Simultaneous c2 solve; parameters in the [p̃_X, t̃_X, {p_Z,d, t_Z,d}]
// layout of Packing{kind, q, false}.
LMResult solve_c2_sim_raw(const CalibProblem& problem, RotationKind kind,
                          const SolverOptions& options);

}  // namespace rwhec::detail
