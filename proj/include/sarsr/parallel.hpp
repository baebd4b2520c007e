#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace sarsr {

/// Execution knob for the per-pixel kernels. Results never depend on `threads`:
/// work is split into disjoint row ranges and every output is written by
/// exactly one worker.
struct Exec {
  int threads = 1;
};

/// Runs fn(begin, end) over contiguous chunks of [0, n).
inline void parallel_rows(int n, Exec exec, const std::function<void(int, int)>& fn) {
  const int workers = std::clamp(exec.threads, 1, std::max(n, 1));
  if (workers == 1) {
    fn(0, n);
    return;
  }
  // Interleaved small chunks balance rows with uneven cost (borders).
  const int chunk = std::max(1, n / (workers * 8));
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int begin = w * chunk; begin < n; begin += workers * chunk) {
        fn(begin, std::min(n, begin + chunk));
      }
    });
  }
}

}  // namespace sarsr
