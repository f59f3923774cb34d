#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace szego::fft {

// Smallest 2^a 3^b 5^c 7^d that is >= n.
inline int smooth_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

// Plans are created once per (size, direction) and shared.  The planner is not
// thread-safe, execution on distinct arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(std::size_t(n));
    if (!buf) throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fftw planning failed for size " + std::to_string(n));
    plans_.emplace(key, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void execute_inplace(std::vector<std::complex<double>>& a, int sign) {
  if (a.empty()) return;
  fftw_plan p = PlanCache::instance().get(int(a.size()), sign);
  auto* z = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(p, z, z);
}

// out_j = sum_k a_k exp(+2 pi i jk/M), unnormalized
inline void backward(std::vector<std::complex<double>>& a) { execute_inplace(a, FFTW_BACKWARD); }
// out_k = sum_j a_j exp(-2 pi i jk/M), unnormalized
inline void forward(std::vector<std::complex<double>>& a) { execute_inplace(a, FFTW_FORWARD); }

}  // namespace szego::fft
