#pragma once

#include <cstdint>
#include <exception>
#include <mutex>

#include <omp.h>

// Replicate loops. Each replicate must write only to its own output slot and
// draw from its own stream, so the OpenMP and serial runners produce identical
// results and the serial one stays as the reference in tests and benchmarks.
namespace starlab::parallel {

/// Worker count for a request: 0 means the OpenMP default.
inline int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

template <class Fn>
void for_each_replicate_serial(int64_t count, Fn&& fn) {
  for (int64_t r = 0; r < count; ++r) fn(r);
}

/// Runs fn(r) for r in [0, count) on `threads` workers. The first exception
/// thrown by any replicate is rethrown after the loop.
template <class Fn>
void for_each_replicate(int64_t count, int threads, Fn&& fn) {
  const int workers = resolve_threads(threads);
  if (workers == 1 || count <= 1) {
    for_each_replicate_serial(count, fn);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
  for (int64_t r = 0; r < count; ++r) {
    try {
      fn(r);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace starlab::parallel
