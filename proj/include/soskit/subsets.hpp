#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "soskit/rational.hpp"

namespace soskit {

/// C(n, m) saturated to uint64 max.
inline std::uint64_t subset_count(std::size_t n, std::size_t m) {
  if (m > n) return 0;
  const Integer c = binomial(n, m);
  return c.fits_ulong_p() ? c.get_ui() : std::numeric_limits<std::uint64_t>::max();
}

/// All m-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> subsets_lex(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  if (m > n) return out;
  std::vector<std::size_t> s(m);
  for (std::size_t k = 0; k < m; ++k) s[k] = k;
  while (true) {
    out.push_back(s);
    std::size_t k = m;
    while (k > 0 && s[k - 1] == n - m + k - 1) --k;
    if (k == 0) break;
    ++s[k - 1];
    for (std::size_t j = k; j < m; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

/// Worker cap from SOSKIT_THREADS, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("SOSKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Smallest index in [0, count) for which `pred` holds, or `count`.
/// Evaluates in parallel; the answer does not depend on scheduling.
template <class Pred>
std::size_t first_match(std::size_t count, Pred&& pred, unsigned workers = worker_count()) {
  if (workers <= 1 || count < 64) {
    for (std::size_t k = 0; k < count; ++k)
      if (pred(k)) return k;
    return count;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::atomic<std::size_t> best{count};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < count; k += workers) {
        if (k >= best.load(std::memory_order_relaxed)) return;
        if (pred(k)) {
          std::size_t cur = best.load();
          while (k < cur && !best.compare_exchange_weak(cur, k)) {
          }
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  return best.load();
}

}  // namespace soskit
