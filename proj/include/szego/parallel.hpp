#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace szego {

// SZEGO_RG_THREADS caps worker parallelism; default is the hardware count.
inline int worker_count() {
  int hw = int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SZEGO_RG_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return hw;
}

// Runs fn(i) for i in [0, n).  Work is handed out by index, results must be
// written to per-index slots so the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(int n, Fn&& fn, int max_workers = 0) {
  if (n <= 0) return;
  int workers = std::min(n, max_workers > 0 ? max_workers : worker_count());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&] {
    for (int i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace szego
