#include "awae/parallel.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace awae::parallel {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = not set yet, use default

int default_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}
}  // namespace

int max_threads() {
  int n = g_max_threads.load(std::memory_order_relaxed);
  return n > 0 ? n : default_threads();
}

void set_max_threads(int n) {
  g_max_threads.store(n > 0 ? n : 0, std::memory_order_relaxed);
}

bool openmp_available() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

namespace detail {

void run_indexed(std::size_t n, void (*fn)(std::size_t, void*), void* ctx) {
#ifdef _OPENMP
  const int threads = max_threads();
  if (threads > 1 && n > 1) {
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i), ctx);
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i, ctx);
}

}  // namespace detail

}  // namespace awae::parallel
