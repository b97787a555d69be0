#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace papdiff {

// Sampling checks evaluate points independently and merge per-index results,
// so the parallel kernels produce bit-identical reports to the serial
// reference. Bodies must not throw; catch per index.
enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class F>
void for_each_index(std::size_t n, Exec exec, F&& body) {
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      body(static_cast<std::size_t>(i));
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace papdiff
