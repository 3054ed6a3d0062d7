#pragma once

#include <functional>
#include <thread>
#include <vector>

#include "mddcm/types.hpp"

namespace mddcm {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads in fixed block
/// partition. Every task writes only its own output slot, so results do not
/// depend on the worker count. Exceptions are captured and rethrown (first
/// task index wins).
inline void parallel_for(Index count, int workers, const std::function<void(Index)>& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  const int used = static_cast<int>(std::min<Index>(workers, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(used));
  std::vector<Index> error_at(static_cast<std::size_t>(used), count);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used));
  for (int w = 0; w < used; ++w) {
    pool.emplace_back([&, w]() {
      const Index lo = count * w / used;
      const Index hi = count * (w + 1) / used;
      for (Index i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          error_at[static_cast<std::size_t>(w)] = i;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();

  Index first = count;
  std::exception_ptr to_throw;
  for (int w = 0; w < used; ++w) {
    if (errors[static_cast<std::size_t>(w)] && error_at[static_cast<std::size_t>(w)] < first) {
      first = error_at[static_cast<std::size_t>(w)];
      to_throw = errors[static_cast<std::size_t>(w)];
    }
  }
  if (to_throw) std::rethrow_exception(to_throw);
}

}  // namespace mddcm
