#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace palab {

// Splits [0, n) into contiguous chunks and runs f(chunk, begin, end) for each
// chunk, using up to `workers` threads. Callers reduce per-chunk results in
// chunk order, which keeps results independent of the worker count as long
// as the chunk layout is fixed by `chunks`, not by `workers`.
template <class F>
void parallel_chunks(std::size_t n, std::size_t chunks, std::size_t workers, F f) {
  if (n == 0) return;
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  workers = std::max<std::size_t>(1, std::min(workers, chunks));
  auto bounds = [&](std::size_t c) { return std::pair{c * n / chunks, (c + 1) * n / chunks}; };
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = bounds(c);
      f(c, b, e);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) {
          auto [b, e] = bounds(c);
          f(c, b, e);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace palab
