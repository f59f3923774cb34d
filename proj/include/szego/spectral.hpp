#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fft.hpp"
#include "field.hpp"

namespace szego {

using PhysicalSamples = std::vector<cplx>;

inline constexpr int kDefaultOversample = 2;

// Number of physical points used for a given padding factor.  Factor 2 gives
// M >= 4 n_max + 2, enough for cubic products of band-limited fields to be
// alias-free on the retained modes.
inline int padded_size(const FrequencyGrid& g, int oversample = kDefaultOversample) {
  if (oversample < 2) throw std::invalid_argument("oversample must be >= 2");
  return fft::smooth_size(oversample * g.size());
}

namespace detail {

inline PhysicalSamples to_physical_m(const SpectralField& f, int m) {
  PhysicalSamples a(std::size_t(m), cplx{});
  const int n = f.n_max();
  for (int k = -n; k <= n; ++k) a[std::size_t(k < 0 ? k + m : k)] = f[k];
  fft::backward(a);
  return a;
}

}  // namespace detail

inline PhysicalSamples to_physical(const SpectralField& f, int oversample = kDefaultOversample) {
  return detail::to_physical_m(f, padded_size(f.grid(), oversample));
}

inline SpectralField from_physical(PhysicalSamples samples, const FrequencyGrid& g) {
  const int m = int(samples.size());
  if (m < g.size()) throw std::invalid_argument("sample count " + std::to_string(m) + " too small for grid");
  fft::forward(samples);
  SpectralField f(g);
  const double inv = 1.0 / m;
  const int n = g.n_max();
  for (int k = -n; k <= n; ++k) f[k] = samples[std::size_t(k < 0 ? k + m : k)] * inv;
  return f;
}

// ---- projectors and multipliers ----

inline SpectralField project_plus(SpectralField f) {
  for (int k = -f.n_max(); k < 0; ++k) f[k] = 0.0;
  return f;
}

inline SpectralField project_minus(SpectralField f) {
  for (int k = 0; k <= f.n_max(); ++k) f[k] = 0.0;
  return f;
}

inline SpectralField apply_abs_D(SpectralField f) {
  const auto& g = f.grid();
  for (int k = -g.n_max(); k <= g.n_max(); ++k) f[k] *= std::abs(g.freq(k));
  return f;
}

inline SpectralField apply_D(SpectralField f) {
  const auto& g = f.grid();
  for (int k = -g.n_max(); k <= g.n_max(); ++k) f[k] *= g.freq(k);
  return f;
}

// 1/D on negative modes, zero on k >= 0
inline SpectralField apply_inv_D_minus(SpectralField f) {
  const auto& g = f.grid();
  for (int k = -g.n_max(); k < 0; ++k) f[k] /= g.freq(k);
  for (int k = 0; k <= g.n_max(); ++k) f[k] = 0.0;
  return f;
}

// Largest multiplier applied by apply_inv_D_minus; L/(2 pi) on a box.
inline double inv_D_minus_gain(const FrequencyGrid& g) { return 1.0 / g.spacing(); }

// e^{-i|D|t}
inline SpectralField free_flow(SpectralField f, double t) {
  if (t == 0.0) return f;
  const auto& g = f.grid();
  for (int k = -g.n_max(); k <= g.n_max(); ++k) f[k] *= std::polar(1.0, -std::abs(g.freq(k)) * t);
  return f;
}

// coefficients of the pointwise conjugate: conj(u)^(k) = conj(u^(-k))
inline SpectralField conjugate(const SpectralField& f) {
  SpectralField r(f.grid());
  const int n = f.n_max();
  for (int k = -n; k <= n; ++k) r[k] = std::conj(f[-k]);
  return r;
}

// ---- norms ----

inline double sobolev_norm(const SpectralField& f, double s) {
  if (s < 0) throw std::invalid_argument("sobolev index must be >= 0");
  const auto& g = f.grid();
  double acc = 0.0;
  for (int k = -g.n_max(); k <= g.n_max(); ++k) {
    double w = s == 0.0 ? 1.0 : std::pow(1.0 + g.freq(k) * g.freq(k), s);
    acc += w * std::norm(f[k]);
  }
  return std::sqrt(acc);
}

inline double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0.0); }

inline double negative_mass(const SpectralField& f) {
  double acc = 0.0;
  for (int k = -f.n_max(); k < 0; ++k) acc += std::norm(f[k]);
  return acc;
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

// ---- dealiased products (physical space, padding factor 2, then truncation) ----

// Pi_N(a b conj(c))
inline SpectralField product3(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
  const int m = padded_size(a.grid());
  auto pa = detail::to_physical_m(a, m);
  auto pb = &a == &b ? pa : detail::to_physical_m(b, m);
  auto pc = &a == &c ? pa : detail::to_physical_m(c, m);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] = pa[i] * pb[i] * std::conj(pc[i]);
  return from_physical(std::move(pa), a.grid());
}

// Pi_N(|u|^2 u)
inline SpectralField cubic(const SpectralField& u) {
  auto p = to_physical(u);
  for (auto& z : p) z *= std::norm(z);
  return from_physical(std::move(p), u.grid());
}

// Pi_N(a b)
inline SpectralField product2(const SpectralField& a, const SpectralField& b) {
  const int m = padded_size(a.grid());
  auto pa = detail::to_physical_m(a, m);
  auto pb = detail::to_physical_m(b, m);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  return from_physical(std::move(pa), a.grid());
}

// Pi_N(|u|^2)
inline SpectralField abs2(const SpectralField& u) {
  auto p = to_physical(u);
  for (auto& z : p) z = std::norm(z);
  return from_physical(std::move(p), u.grid());
}

// ---- conserved quantities of the NLW flow ----

inline double mass(const SpectralField& f) { return sobolev_norm(f, 0.0) * sobolev_norm(f, 0.0); }

inline double momentum(const SpectralField& f) {
  const auto& g = f.grid();
  double acc = 0.0;
  for (int k = -g.n_max(); k <= g.n_max(); ++k) acc += g.freq(k) * std::norm(f[k]);
  return acc;
}

// (1/L) int |u|^4 dx, exact for band-limited u on the padded grid
inline double quartic_mean(const SpectralField& f) {
  auto p = to_physical(f);
  double acc = 0.0;
  for (auto& z : p) acc += std::norm(z) * std::norm(z);
  return acc / double(p.size());
}

inline double energy(const SpectralField& f) {
  const auto& g = f.grid();
  double kin = 0.0;
  for (int k = -g.n_max(); k <= g.n_max(); ++k) kin += std::abs(g.freq(k)) * std::norm(f[k]);
  return 0.5 * kin + 0.25 * quartic_mean(f);
}

inline constexpr double kDriftFloor = 1e-30;

struct ConservedReport {
  std::vector<double> times, energy, mass, momentum, h_half;
  double drift_energy = 0, drift_mass = 0, drift_momentum = 0, drift_h_half = 0;
};

inline double max_rel_drift(const std::vector<double>& q) {
  if (q.empty()) return 0.0;
  double d = 0.0;
  for (double v : q) d = std::max(d, std::abs(v - q.front()));
  return d / std::max(std::abs(q.front()), kDriftFloor);
}

inline void append_sample(ConservedReport& r, double t, const SpectralField& f) {
  r.times.push_back(t);
  r.energy.push_back(energy(f));
  r.mass.push_back(mass(f));
  r.momentum.push_back(momentum(f));
  r.h_half.push_back(sobolev_norm(f, 0.5));
}

inline void finalize_drifts(ConservedReport& r) {
  r.drift_energy = max_rel_drift(r.energy);
  r.drift_mass = max_rel_drift(r.mass);
  r.drift_momentum = max_rel_drift(r.momentum);
  r.drift_h_half = max_rel_drift(r.h_half);
}

}  // namespace szego
