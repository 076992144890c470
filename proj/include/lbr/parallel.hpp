#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace lbr {

// Worker count used when a call passes 0. Starts at the hardware concurrency.
unsigned default_workers();
void set_default_workers(unsigned workers);

// results[i] = fn(i) for i < count, computed on `workers` threads. Each index
// must draw only from its own substream; the output then does not depend on
// the worker count or on scheduling.
template <class F>
auto parallel_map(std::size_t count, F&& fn, unsigned workers = 0) {
  using R = decltype(fn(std::size_t{}));
  static_assert(!std::is_same_v<R, bool>, "vector<bool> elements cannot be written concurrently");
  std::vector<R> results;
  results.reserve(count);
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results.push_back(fn(i));
    return results;
  }
  std::vector<std::optional<R>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (error) std::rethrow_exception(error);
  for (auto& s : slots) results.push_back(std::move(*s));
  return results;
}

}  // namespace lbr
