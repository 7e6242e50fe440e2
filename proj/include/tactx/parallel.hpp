#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace tactx::num {

namespace detail {

inline unsigned default_thread_count() {
  if (const char* env = std::getenv("TACTX_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 4u);
}

inline unsigned& thread_count_storage() {
  static unsigned count = default_thread_count();
  return count;
}

}  // namespace detail

inline unsigned thread_count() { return detail::thread_count_storage(); }

inline void set_thread_count(unsigned n) {
  detail::thread_count_storage() = n == 0 ? 1 : n;
}

namespace detail {
// Nested parallel regions run inline on the calling thread.
inline bool& in_parallel_region() {
  thread_local bool inside = false;
  return inside;
}
}  // namespace detail

// Runs fn(begin, end) over a fixed partition of [0, count). The partition
// depends only on `count` and the thread count, and every index is owned by
// exactly one invocation, so results are identical for any thread count.
template <typename Fn>
void parallel_ranges(std::size_t count, Fn&& fn) {
  const unsigned threads = std::min<std::size_t>(thread_count(), count);
  if (threads <= 1 || detail::in_parallel_region()) {
    if (count > 0) fn(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      detail::in_parallel_region() = true;
      fn(begin, end);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace tactx::num
