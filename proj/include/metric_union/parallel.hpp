#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace metric_union {

/// Thread cap from METRIC_UNION_THREADS; 1 when unset or malformed.
inline std::size_t configured_threads() {
  const char* env = std::getenv("METRIC_UNION_THREADS");
  if (!env) return 1;
  try {
    const long v = std::stol(env);
    return v >= 1 ? static_cast<std::size_t>(v) : 1;
  } catch (...) {
    return 1;
  }
}

/// Runs `fn(block, begin, end)` over contiguous blocks of [0, n). Blocks are
/// fixed by (n, threads) only, so callers that reduce per-block results in
/// block order get identical output for any thread count.
template <class Fn>
void for_blocks(std::size_t n, std::size_t threads, std::size_t blocks, Fn&& fn) {
  blocks = std::max<std::size_t>(1, std::min(blocks, n));
  const auto bounds = [&](std::size_t b) { return std::pair{n * b / blocks, n * (b + 1) / blocks}; };
  if (threads <= 1 || blocks == 1) {
    for (std::size_t b = 0; b < blocks; ++b) {
      auto [lo, hi] = bounds(b);
      fn(b, lo, hi);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(blocks);
  std::vector<std::thread> pool;
  const std::size_t workers = std::min(threads, blocks);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t b = w; b < blocks; b += workers) {
        try {
          auto [lo, hi] = bounds(b);
          fn(b, lo, hi);
        } catch (...) {
          errors[b] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace metric_union
