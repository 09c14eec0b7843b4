#ifndef HQM_PARALLEL_HPP
#define HQM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace hqm {

// Worker count shared by all field kernels. Experiments fan out pure
// evaluations over grid chunks; there is no shared mutable state.
inline std::atomic<int>& thread_count_ref() {
  static std::atomic<int> n{static_cast<int>(
      std::max(1u, std::min(8u, std::thread::hardware_concurrency())))};
  return n;
}

inline void set_thread_count(int n) { thread_count_ref() = std::max(1, n); }
inline int thread_count() { return thread_count_ref().load(); }

// Chunked parallel loop over [0, n). The body receives [begin, end).
inline void parallel_for(std::int64_t n,
                         const std::function<void(std::int64_t, std::int64_t)>& body) {
  const int nt = thread_count();
  if (nt <= 1 || n < 4096) {
    body(0, n);
    return;
  }
  const std::int64_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    const std::int64_t b = t * chunk;
    const std::int64_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace hqm

#endif
