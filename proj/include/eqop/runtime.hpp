#pragma once

namespace eqop {

/// Thread cap from EQOP_THREADS (default: hardware concurrency). Throws
/// ValidationError when the variable is not a positive integer.
int thread_limit();

/// Applies thread_limit() to the dense linear algebra kernels and returns it.
int configure_threads();

}  // namespace eqop
