#pragma once

// Runtime switch between the OpenMP kernels and their serial twins.
// Every parallel kernel merges per-thread buffers and sorts, so results
// are identical bit-for-bit regardless of the schedule.

#ifdef _OPENMP
#include <omp.h>
#endif

namespace heardof {

inline bool& parallel_enabled() {
  static bool enabled = true;
  return enabled;
}

inline int worker_count() {
#ifdef _OPENMP
  return parallel_enabled() ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

}  // namespace heardof
