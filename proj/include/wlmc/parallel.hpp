/**
 * @file parallel.hpp
 * @brief Static fan-out of index ranges over worker threads.
 *
 * Work is split into fixed blocks; callers write into per-index slots and
 * reduce afterwards in index order, which keeps results bit-identical for
 * any worker count.
 */
#ifndef WLMC_PARALLEL_HPP
#define WLMC_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wlmc {

struct Execution {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;

  unsigned resolved() const noexcept {
    if (threads != 0) return threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1u : hc;
  }
};

/// Calls body(worker, begin, end) on disjoint blocks covering [0, n).
///
/// If several blocks throw, the exception of the lowest block is rethrown so
/// failures are reported identically regardless of scheduling.
template <class Body>
void parallel_blocks(std::size_t n, Execution exec, Body&& body) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(exec.resolved(), n);
  if (workers <= 1) {
    body(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          body(w, begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace wlmc

#endif  // WLMC_PARALLEL_HPP
