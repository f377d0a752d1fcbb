#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace sau {

// Calls fn(i) for i in [0, n) on up to `jobs` threads, striding indices so each
// worker gets a similar mix of cheap and expensive items. fn must only write
// to slots owned by i.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

}  // namespace sau
