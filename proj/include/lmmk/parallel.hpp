#pragma once

namespace lmmk::parallel {

/// Number of threads OpenMP regions may use.
int max_threads();

/// Caps parallelism; n < 1 is ignored.
void set_thread_limit(int n);

/// Applies LMMK_THREADS when set. Returns the resulting cap.
int configure_from_env();

}  // namespace lmmk::parallel
