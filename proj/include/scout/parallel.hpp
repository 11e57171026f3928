#pragma once

#include <exception>
#include <mutex>

#include "scout/core.hpp"

#ifdef SCOUT_HAVE_OPENMP
#  include <omp.h>
#endif

namespace scout {

  /// Set the worker count used by parallel loops (values < 1 select hardware parallelism).
  void set_num_threads(int n);

  /// Current worker count.
  [[nodiscard]] int num_threads();

  /**
   * @brief Run fn(i) for i in [0, n) across the worker pool.
   *
   * Iterations must write disjoint data. If any iteration throws, the exception from the lowest index is rethrown
   * after the loop completes, which keeps error reports independent of scheduling.
   */
  template <typename F>
  void parallel_for(Index n, F&& fn) {
    std::exception_ptr first_error;
    Index first_index = n;
    std::mutex guard;

#ifdef SCOUT_HAVE_OPENMP
#  pragma omp parallel for schedule(static) num_threads(num_threads()) if (n > 1 && num_threads() > 1)
#endif
    for (Index i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock{guard};
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
      }
    }

    if (first_error) {
      std::rethrow_exception(first_error);
    }
  }

}  // namespace scout
