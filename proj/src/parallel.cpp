#include "scout/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace scout {

  namespace {

    int hardware_threads() {
      char const* env = std::getenv("SADDLE_SCOUT_THREADS");
      if (env != nullptr) {
        try {
          int const n = std::stoi(env);
          if (n > 0) {
            return n;
          }
        } catch (std::exception const&) {
          // Fall through to the hardware count.
        }
      }
      unsigned const hw = std::thread::hardware_concurrency();
      return hw == 0 ? 1 : static_cast<int>(hw);
    }

    std::atomic<int>& thread_setting() {
      static std::atomic<int> n{hardware_threads()};
      return n;
    }

  }  // namespace

  void set_num_threads(int n) { thread_setting() = n < 1 ? hardware_threads() : n; }

  int num_threads() {
#ifdef SCOUT_HAVE_OPENMP
    return thread_setting();
#else
    return 1;
#endif
  }

}  // namespace scout
