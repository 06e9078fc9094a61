#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bpr {

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
#endif
}

// Runs fn(i) for i in [0, n).  threads == 1 is the serial reference path;
// threads <= 0 means machine parallelism.  Tasks must write results only
// into per-index slots so the outcome is identical on both paths; the
// first exception thrown by any task is rethrown after the loop.
template <typename Fn>
void parallel_for_index(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 0) threads = hardware_threads();
#ifdef _OPENMP
  if (threads > 1 && n > 1) {
    std::exception_ptr error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace bpr
