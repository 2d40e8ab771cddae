#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cavnet::detail {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Run fn(worker_id, item) for item = 0..n-1 on up to n_workers threads.
/// Items are claimed from a shared counter, so callers must make results
/// independent of which worker handles which item. With one worker
/// everything runs inline on the calling thread.
template <class Fn>
void parallel_items(std::int64_t n, int n_workers, Fn&& fn) {
  if (n <= 0) return;
  if (n_workers > n) n_workers = static_cast<int>(n);
  if (n_workers <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(0, i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&](int w) {
    try {
      for (;;) {
        const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) break;
        fn(w, i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(n, std::memory_order_relaxed);  // stop other workers
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_workers - 1);
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(body, w);
  body(0);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Kahan-Neumaier compensated accumulator; summation error stays O(eps)
/// independent of the number of terms.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace cavnet::detail
