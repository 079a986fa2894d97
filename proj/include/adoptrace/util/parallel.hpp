#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace adoptrace {

// Maps `fn` over [0, n) using up to `threads` workers on contiguous chunks.
// Results land at their input index, so output order never depends on the
// thread count. The first exception thrown by any worker is rethrown.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, unsigned threads, Fn&& fn) {
  std::vector<Result> out(n);
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Splits [0, n) into at most `parts` contiguous half-open ranges.
inline std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(std::size_t n,
                                                                     unsigned parts) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t k = std::clamp<std::size_t>(parts, 1, std::max<std::size_t>(n, 1));
  const std::size_t chunk = (n + k - 1) / k;
  for (std::size_t lo = 0; lo < n; lo += chunk) out.emplace_back(lo, std::min(n, lo + chunk));
  return out;
}

}  // namespace adoptrace
