#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Ordered parallel map. Results land in input order whatever the schedule, so
// callers get identical output for any worker count.
namespace geniuskit::parallel {

/// Serial reference kernel.
template <typename Fn>
auto map_serial(std::size_t count, Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Result> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(fn(i));
  return out;
}

/// OpenMP kernel. Falls back to the serial path for workers <= 1 or builds
/// without OpenMP. The first exception thrown by any item is rethrown.
template <typename Fn>
auto map_ordered(std::size_t count, int workers, Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
#ifdef _OPENMP
  if (workers > 1 && count > 1) {
    static_assert(std::is_default_constructible_v<Result>, "parallel results are pre-allocated");
    std::vector<Result> out(count);
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
    for (long long i = 0; i < n; ++i) {
      try {
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return out;
  }
#endif
  (void)workers;
  return map_serial(count, fn);
}

/// Index of the calling worker inside map_ordered, 0 outside a parallel region.
inline int worker_index() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

}  // namespace geniuskit::parallel
