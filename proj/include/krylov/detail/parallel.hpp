#pragma once

#include <thread>
#include <vector>

#include "krylov/types.hpp"

namespace krylov::detail {

/// Runs fn(i) for i in [0, count), optionally across hardware threads.
/// Bodies must touch disjoint state; results are schedule-independent.
template <typename Fn>
void for_each_index(Index count, bool parallel, Fn&& fn) {
  if (!parallel || count < 2) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  const Index workers = std::min<Index>(
      count, static_cast<Index>(std::max(1u, std::thread::hardware_concurrency())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace krylov::detail
