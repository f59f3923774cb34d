#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spectral.hpp"

namespace szego {

enum class DataKind { HardyPolynomial, RationalNonGeneric, SeededRandomHardy, PoissonBump };

struct InitialDataSpec {
  DataKind kind = DataKind::HardyPolynomial;
  std::vector<std::pair<int, cplx>> modes{{1, 2.0}, {2, 1.0}};  // HardyPolynomial
  std::uint64_t seed = 1;                                       // SeededRandomHardy
  double decay = 0.5;      // SeededRandomHardy: amplitude e^{-decay k}
  double ratio = 0.5;      // PoissonBump on the torus: c_k = ratio^k
  double normalization = 1.0;  // overall multiplier
  bool operator==(const InitialDataSpec&) const = default;
};

// Complex Gaussian coefficients scaled to unit L2 norm.  Hardy fields keep k >= 0 only.
inline SpectralField random_field(const FrequencyGrid& g, std::mt19937_64& rng, bool hardy = false) {
  std::normal_distribution<double> nd(0.0, 1.0);
  SpectralField f(g);
  for (int k = -g.n_max(); k <= g.n_max(); ++k) {
    const double re = nd(rng), im = nd(rng);
    if (!hardy || k >= 0) f[k] = cplx(re, im);
  }
  const double nrm = l2_norm(f);
  if (nrm > 0) f *= 1.0 / nrm;
  return f;
}

inline SpectralField random_field(const FrequencyGrid& g, std::uint64_t seed, bool hardy = false) {
  std::mt19937_64 rng(seed);
  return random_field(g, rng, hardy);
}

// Box data are exact Fourier samples c_k = W^(xi_k)/L of the line function, so
// they stay exactly Hardy; W^(0) is the limit from xi > 0.
inline SpectralField make_initial_data(const InitialDataSpec& spec, const FrequencyGrid& g) {
  SpectralField f(g);
  const double two_pi_over_l = 2.0 * std::numbers::pi / g.length();
  switch (spec.kind) {
    case DataKind::HardyPolynomial:
      for (auto [k, a] : spec.modes) {
        if (k < 0) throw std::invalid_argument("HardyPolynomial modes must be >= 0");
        if (!g.contains(k)) throw std::invalid_argument("HardyPolynomial mode outside grid");
        f[k] += a;
      }
      break;
    case DataKind::RationalNonGeneric:
      // 1/(x+i) - 2/(x+2i)
      if (g.torus()) throw std::invalid_argument("RationalNonGeneric data needs a BigBox grid");
      for (int k = 0; k <= g.n_max(); ++k) {
        const double xi = g.freq(k);
        f[k] = -I * two_pi_over_l * (std::exp(-xi) - 2.0 * std::exp(-2.0 * xi));
      }
      break;
    case DataKind::PoissonBump:
      for (int k = 0; k <= g.n_max(); ++k) {
        if (g.torus())
          f[k] = std::pow(spec.ratio, k);
        else
          f[k] = -I * two_pi_over_l * std::exp(-g.freq(k));  // 1/(x+i)
      }
      break;
    case DataKind::SeededRandomHardy: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> nd(0.0, 1.0);
      for (int k = 0; k <= g.n_max(); ++k) {
        const double re = nd(rng), im = nd(rng);
        f[k] = cplx(re, im) * std::exp(-spec.decay * g.freq(k));
      }
      const double nrm = l2_norm(f);
      if (nrm > 0) f *= 1.0 / nrm;
      break;
    }
  }
  f *= spec.normalization;
  return f;
}

}  // namespace szego
