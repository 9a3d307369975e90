#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "comonotone/rng.hpp"

namespace comonotone {

/// Worker count: `requested` if positive, else COMONOTONE_WORKERS, else the
/// hardware concurrency (at least 1).
unsigned resolve_workers(unsigned requested);

/// Runs `eval(path_index, rng, row)` for every path index in [0, n_paths),
/// each with its own RngStream(seed, path_index), and returns the row-major
/// n_paths x cols table of outputs. The table is independent of the worker
/// count; reductions over it are done serially by the caller.
template <class Eval>
std::vector<double> map_paths(std::size_t n_paths, std::size_t cols, std::uint64_t seed,
                              unsigned workers, Eval&& eval) {
  std::vector<double> table(n_paths * cols);
  const unsigned w = resolve_workers(workers);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RngStream rng(seed, i);
      eval(i, rng, std::span<double>(table.data() + i * cols, cols));
    }
  };
  if (w <= 1 || n_paths < 2 * static_cast<std::size_t>(w)) {
    run_range(0, n_paths);
    return table;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> threads;
  threads.reserve(w);
  const std::size_t chunk = (n_paths + w - 1) / w;
  for (unsigned t = 0; t < w; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n_paths, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        run_range(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  threads.clear();  // joins
  if (failure) std::rethrow_exception(failure);
  return table;
}

}  // namespace comonotone
