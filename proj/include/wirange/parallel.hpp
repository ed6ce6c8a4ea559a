#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace wirange {

inline unsigned resolve_threads(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

// Run f(i) for i in [0, n) on a worker pool. Iteration order is unspecified;
// f must write only to its own output slot so results are identical for any
// thread count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& f) {
  const unsigned nt = static_cast<unsigned>(
      std::min<std::size_t>(resolve_threads(threads), n ? n : 1));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace wirange
