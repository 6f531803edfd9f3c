#pragma once

// Runtime switch for the OpenMP kernels.  Every parallel loop in this
// library writes to disjoint slots (no reductions across threads), so the
// parallel and serial paths produce bitwise-identical results; the switch
// exists for testing and benchmarking the serial reference.

namespace rwhec {

void set_parallel_enabled(bool enabled);
bool parallel_enabled();

/// Number of threads the parallel kernels will use (1 when disabled or
/// when built without OpenMP).
int parallel_threads();

}  // namespace rwhec
