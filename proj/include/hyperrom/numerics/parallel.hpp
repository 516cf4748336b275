// SPDX-License-Identifier: Apache-2.0

#ifndef HYPERROM_NUMERICS_PARALLEL_HPP
#define HYPERROM_NUMERICS_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace hyperrom {

// Run fn(begin, end) over disjoint chunks of [0, n). Each worker writes only
// to its own output slots, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  std::size_t nt = threads <= 1 ? 1 : static_cast<std::size_t>(threads);
  nt = std::min(nt, n);
  if (nt == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

inline int default_thread_count() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace hyperrom

#endif
