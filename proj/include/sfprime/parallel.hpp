#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

namespace sfprime {

// Kahan-Babuska (Neumaier) compensated accumulator in extended precision.
// Summation order is whatever the caller feeds it; callers that need
// reproducible totals must fix that order themselves.
class NeumaierSum {
 public:
  void add(long double x) {
    long double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// Runs fn(chunk_index) for chunk_index in [0, n_chunks) on up to `threads`
// workers. The chunk decomposition is chosen by the caller and must not
// depend on the worker count; per-chunk results go into caller-owned slots,
// so a sequential reduction over chunk index gives the same bits for any
// thread count.
template <class Fn>
void run_chunks(std::size_t n_chunks, int threads, Fn&& fn) {
  if (threads <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      fn(c);
    }
  };
  std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n_chunks);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

// Fixed chunk count for a loop of n iterations: a function of the problem
// size only, never of the thread count.
inline std::size_t default_chunk_count(std::size_t n) {
  if (n == 0) return 0;
  std::size_t by_size = (n + 4095) / 4096;
  return std::min<std::size_t>(256, std::max<std::size_t>(1, by_size));
}

}  // namespace sfprime
