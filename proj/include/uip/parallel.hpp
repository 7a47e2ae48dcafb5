#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#if defined(UIP_HAVE_OPENMP)
#include <omp.h>
#endif

namespace uip {

// Serial is the reference implementation; OpenMP results must match it
// bit for bit because every kernel writes per-index slots and all
// reductions happen serially afterwards, in index order.
enum class Backend { Serial, OpenMP };

struct Execution {
  Backend backend = Backend::OpenMP;
  int workers = 0;  // 0: OpenMP default

  static Execution serial() { return {Backend::Serial, 1}; }
  static Execution openmp(int workers = 0) { return {Backend::OpenMP, workers}; }
};

inline bool openmp_available() {
#if defined(UIP_HAVE_OPENMP)
  return true;
#else
  return false;
#endif
}

// Calls fn(i) for i in [0, n). Exceptions thrown by fn are rethrown on the
// calling thread (first one wins).
template <typename Fn>
void parallel_for(const Execution& exec, std::size_t n, Fn&& fn) {
  if (exec.backend == Backend::Serial || !openmp_available() || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#if defined(UIP_HAVE_OPENMP)
  std::exception_ptr error;
  std::mutex error_mutex;
  const int threads = exec.workers > 0 ? exec.workers : omp_get_max_threads();
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
#endif
}

}  // namespace uip
