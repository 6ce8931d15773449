#pragma once

#include <cstddef>

namespace awae::parallel {

// Thread count used by the data-parallel kernels. 1 selects the serial
// reference path; values > 1 enable the OpenMP path when compiled in.
int max_threads();
void set_max_threads(int n);

// True when the binary was built with OpenMP support.
bool openmp_available();

namespace detail {
void run_indexed(std::size_t n, void (*fn)(std::size_t, void*), void* ctx);
}

// Applies f(i) for i in [0, n). Iterations must be independent; output for a
// given i must not depend on thread count so serial and parallel runs match
// bitwise.
template <class F>
void for_each_index(std::size_t n, F&& f) {
  auto trampoline = [](std::size_t i, void* ctx) {
    (*static_cast<F*>(ctx))(i);
  };
  detail::run_indexed(n, trampoline, &f);
}

}  // namespace awae::parallel
