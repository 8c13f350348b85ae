#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace causalkit {

/// Global worker cap for parallel_for. Results never depend on this value:
/// parallel loops write to disjoint slots and reductions run in index order.
int max_threads();
void set_max_threads(int n);

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};  // 0 = use hardware_concurrency
  return cap;
}
}  // namespace detail

inline int max_threads() {
  const int cap = detail::thread_cap().load();
  if (cap > 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline void set_max_threads(int n) { detail::thread_cap().store(n < 1 ? 1 : n); }

/// Runs fn(i) for i in [begin, end), split into contiguous chunks across
/// worker threads. fn must only touch state owned by index i. The first
/// exception thrown by any worker is rethrown on the caller.
inline void parallel_for(int begin, int end, const std::function<void(int)>& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  const int workers = std::min(max_threads(), count);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<int> next{begin};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto body = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= end || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        bool expected = false;
        if (failed.compare_exchange_strong(expected, true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace causalkit
