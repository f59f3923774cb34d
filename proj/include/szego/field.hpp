#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "grid.hpp"

namespace szego {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Fourier coefficients u^(k), k = -n_max..n_max, stored at k + n_max.
class SpectralField {
 public:
  explicit SpectralField(const FrequencyGrid& g) : grid_(g), c_(g.size()) {}
  SpectralField(const FrequencyGrid& g, std::vector<cplx> coeffs) : grid_(g), c_(std::move(coeffs)) {
    if (int(c_.size()) != g.size()) throw std::invalid_argument("coefficient count does not match grid");
  }

  const FrequencyGrid& grid() const { return grid_; }
  int n_max() const { return grid_.n_max(); }

  cplx coeff(int k) const { return c_[grid_.index(k)]; }
  cplx& operator[](int k) { return c_[grid_.index(k)]; }
  cplx operator[](int k) const { return c_[grid_.index(k)]; }
  // zero outside the grid, for kernels that resolve an index by momentum
  cplx at_or_zero(int k) const { return grid_.contains(k) ? c_[grid_.index(k)] : cplx{}; }

  std::span<cplx> data() { return c_; }
  std::span<const cplx> data() const { return c_; }
  const std::vector<cplx>& values() const { return c_; }

  SpectralField& operator+=(const SpectralField& o) {
    same_grid(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    same_grid(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  SpectralField& operator*=(cplx a) {
    for (auto& z : c_) z *= a;
    return *this;
  }
  // this += a*o
  SpectralField& axpy(cplx a, const SpectralField& o) {
    same_grid(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += a * o.c_[i];
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(cplx s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, cplx s) { return a *= s; }

  bool operator==(const SpectralField& o) const { return grid_ == o.grid_ && c_ == o.c_; }

 private:
  void same_grid(const SpectralField& o) const {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("fields live on different grids");
  }

  FrequencyGrid grid_;
  std::vector<cplx> c_;
};

inline SpectralField single_mode(const FrequencyGrid& g, int k, cplx a = 1.0) {
  SpectralField f(g);
  f[k] = a;
  return f;
}

}  // namespace szego
