#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace ppt {

/// Worker count used by Monte Carlo loops. Defaults to $PPT_THREADS, else 1.
unsigned thread_count() noexcept;
void set_thread_count(unsigned n) noexcept;

/// Runs body(i) for i in [0, n) over a fixed static partition. Each index owns
/// its output slot, so results do not depend on the worker count. The
/// exception thrown at the lowest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

template <class T, class F>
std::vector<T> replicate(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace ppt
