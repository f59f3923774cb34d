#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace szego {

enum class Domain { Torus, BigBox };

inline const char* to_string(Domain d) { return d == Domain::Torus ? "torus" : "bigbox"; }

class FrequencyGrid {
 public:
  FrequencyGrid(int n_max, Domain domain, double length) : n_(n_max), domain_(domain), length_(length) {
    if (n_max < 4) throw std::invalid_argument("n_max must be >= 4, got " + std::to_string(n_max));
    if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("grid length must be positive");
    if (domain == Domain::Torus) {
      if (std::abs(length - 2.0 * std::numbers::pi) > 1e-12) throw std::invalid_argument("torus grid requires length 2*pi");
      length_ = 2.0 * std::numbers::pi;
      dk_ = 1.0;
    } else {
      dk_ = 2.0 * std::numbers::pi / length;
    }
  }

  int n_max() const { return n_; }
  int size() const { return 2 * n_ + 1; }
  Domain domain() const { return domain_; }
  bool torus() const { return domain_ == Domain::Torus; }
  double length() const { return length_; }
  // frequency spacing 2*pi/L (exactly 1 on the torus)
  double spacing() const { return dk_; }

  bool contains(int k) const { return k >= -n_ && k <= n_; }
  int index(int k) const { return k + n_; }
  double freq(int k) const { return domain_ == Domain::Torus ? double(k) : dk_ * k; }

  bool operator==(const FrequencyGrid& o) const {
    return n_ == o.n_ && domain_ == o.domain_ && length_ == o.length_;
  }

 private:
  int n_;
  Domain domain_;
  double length_;
  double dk_ = 1.0;
};

inline FrequencyGrid make_grid(int n_max, Domain domain, double length) { return FrequencyGrid(n_max, domain, length); }

inline FrequencyGrid torus_grid(int n_max) { return FrequencyGrid(n_max, Domain::Torus, 2.0 * std::numbers::pi); }

}  // namespace szego
