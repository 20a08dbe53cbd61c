// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace groundseq {

/// Worker count for OpenMP regions; 0 or less means "use the runtime default".
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, n) on `workers` threads. The first exception thrown by any
/// iteration is rethrown after the loop; remaining iterations still run.
template <typename Body>
void parallel_for(long n, int workers, Body&& body) {
  std::exception_ptr first;
  std::mutex guard;
  const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  (void)threads;
  if (first) std::rethrow_exception(first);
}

}  // namespace groundseq
