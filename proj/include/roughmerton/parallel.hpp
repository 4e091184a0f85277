#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace roughmerton {

/// Worker count used by the path simulators. Defaults to the hardware
/// concurrency, overridable with ROUGHMERTON_THREADS or set_thread_count.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to
/// thread_count() threads. Exceptions from workers are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Evaluates fn(i) for every path index; slot i is written by exactly one
/// worker, so the result is independent of the thread count.
template <typename Fn>
std::vector<double> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
  });
  return out;
}

}  // namespace roughmerton
