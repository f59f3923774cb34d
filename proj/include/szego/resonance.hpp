#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "spectral.hpp"

namespace szego {

// ---- phase and resonant sets ----

struct Quadruple {
  int k, l, m, j;
};

inline double phase(const FrequencyGrid& g, int k, int l, int m, int j) {
  if (g.torus()) return double(std::abs(k) - std::abs(l) + std::abs(m) - std::abs(j));
  return std::abs(g.freq(k)) - std::abs(g.freq(l)) + std::abs(g.freq(m)) - std::abs(g.freq(j));
}

// Integer test on the torus; on a box frequencies are multiples of 2pi/L, so a
// threshold far below one spacing cannot misclassify.
inline bool phase_vanishes(const FrequencyGrid& g, int k, int l, int m, int j) {
  if (g.torus()) return std::abs(k) - std::abs(l) + std::abs(m) - std::abs(j) == 0;
  return std::abs(phase(g, k, l, m, j)) < 1e-12 * g.spacing();
}

inline void require_momentum(int k, int l, int m, int j) {
  if (k - l + m - j != 0)
    throw std::invalid_argument("quadruple (" + std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(m) + "," +
                                std::to_string(j) + ") violates k-l+m-j=0");
}

inline bool is_resonant_torus(int k, int l, int m, int j) {
  require_momentum(k, l, m, j);
  const bool all_nonneg = l >= 0 && m >= 0 && j >= 0;
  const bool all_nonpos = l <= 0 && m <= 0 && j <= 0;
  if (k > 0) return all_nonneg || k == l || k == j;
  if (k == 0) return all_nonneg || all_nonpos;
  return all_nonpos || k == l || k == j;
}

// Sign pattern on the box frequencies; identical index logic since sign(freq(k)) = sign(k).
inline bool is_resonant_line(const FrequencyGrid& g, int k, int l, int m, int j) {
  require_momentum(k, l, m, j);
  const double a = g.freq(k), b = g.freq(l), c = g.freq(m), d = g.freq(j);
  const bool nonneg = a >= 0 && b >= 0 && c >= 0 && d >= 0;
  const bool nonpos = a <= 0 && b <= 0 && c <= 0 && d <= 0;
  const bool diag1 = k == l && m == j;
  const bool diag2 = k == j && l == m;
  return nonneg || nonpos || diag1 || diag2;
}

// ---- generic quadruple sums ----

// out(k) = sum over (l, m), j = k - l + m in range, of term(k, l, m, j).
// Parallel over k, sequential and lexicographic in (l, m) within each k.
template <class Term>
SpectralField quad_sum(const FrequencyGrid& g, Term&& term) {
  const int n = g.n_max();
  SpectralField out(g);
  parallel_for(g.size(), [&](int ik) {
    const int k = ik - n;
    cplx acc{};
    for (int l = -n; l <= n; ++l) {
      const int m_lo = std::max(-n, l - k - n), m_hi = std::min(n, l - k + n);
      for (int m = m_lo; m <= m_hi; ++m) acc += term(k, l, m, k - l + m);
    }
    out[k] = acc;
  });
  return out;
}

// out(k) = sum w(k,l,m,j) a(j) b(l) conj(c(m))
template <class Weight>
SpectralField trilinear_sum(const SpectralField& a, const SpectralField& b, const SpectralField& c, Weight&& w) {
  return quad_sum(a.grid(), [&](int k, int l, int m, int j) -> cplx {
    const cplx wt = w(k, l, m, j);
    if (wt == cplx{}) return {};
    return wt * a[j] * b[l] * std::conj(c[m]);
  });
}

// ---- the nonlinearity and its splitting ----

// f(u,t) = -i e^{i|D|t}(|e^{-i|D|t}u|^2 e^{-i|D|t}u)
inline SpectralField f_full(const SpectralField& u, double t) {
  return free_flow(-I * cubic(free_flow(u, t)), -t);
}

inline SpectralField f_res_bruteforce(const SpectralField& u) {
  const auto& g = u.grid();
  return trilinear_sum(u, u, u, [&](int k, int l, int m, int j) { return phase_vanishes(g, k, l, m, j) ? -I : cplx{}; });
}

inline SpectralField f_osc(const SpectralField& u, double t) {
  const auto& g = u.grid();
  return trilinear_sum(u, u, u, [&](int k, int l, int m, int j) -> cplx {
    if (phase_vanishes(g, k, l, m, j)) return {};
    return -I * std::polar(1.0, t * phase(g, k, l, m, j));
  });
}

namespace detail {

// Ten-term resonant nonlinearity.  Valid on either grid: the resonant index
// sets of the torus and of the box coincide.  `corrupt` drops one term and
// exists only as a negative control for the audit.
inline SpectralField f_res_ten_term(const SpectralField& u, bool corrupt = false) {
  const auto up = project_plus(u);
  const auto um = project_minus(u);
  const double norm_m = mass(um);
  const double norm_p = mass(up);
  const cplx u0 = u[0];

  SpectralField out = -I * project_plus(cubic(up));
  if (!corrupt) out.axpy(-2.0 * I * norm_m, up);
  const auto cm = cubic(um);
  out[0] += -I * cm[0];
  out.axpy(-I, project_minus(cm));
  out.axpy(-2.0 * I * u0, project_minus(abs2(um)));
  out.axpy(-I * std::conj(u0), product2(um, um));
  out.axpy(-2.0 * I * norm_p, um);
  return out;
}

inline void require_torus(const FrequencyGrid& g, const char* what) {
  if (!g.torus()) throw std::invalid_argument(std::string(what) + " requires a torus grid");
}

inline void require_box(const FrequencyGrid& g, const char* what) {
  if (g.torus()) throw std::invalid_argument(std::string(what) + " requires a BigBox grid");
}

inline void require_hardy(const SpectralField& f, const char* what) {
  if (negative_mass(f) > 1e-12) throw std::invalid_argument(std::string(what) + " requires Hardy input (k >= 0 support)");
}

}  // namespace detail

inline SpectralField f_res_closed_torus(const SpectralField& u) {
  detail::require_torus(u.grid(), "f_res_closed_torus");
  return detail::f_res_ten_term(u);
}

inline SpectralField f_res_closed_line(const SpectralField& u) {
  detail::require_box(u.grid(), "f_res_closed_line");
  return -I * (project_plus(cubic(project_plus(u))) + project_minus(cubic(project_minus(u))));
}

// Brute force over the sign-coherent region {all >= 0} u {all < 0}; this is
// exactly the index set the two-term line formula keeps.
inline SpectralField f_res_line_region_bruteforce(const SpectralField& u) {
  return trilinear_sum(u, u, u, [](int k, int l, int m, int j) -> cplx {
    const bool pos = k >= 0 && l >= 0 && m >= 0 && j >= 0;
    const bool neg = k < 0 && l < 0 && m < 0 && j < 0;
    return pos || neg ? -I : cplx{};
  });
}

// Resonant contributions the line formula drops: mixed-sign diagonals and
// zero-frequency boundary quadruples.  Vanishes identically on Hardy fields.
inline SpectralField f_res_line_dropped(const SpectralField& u) {
  detail::require_box(u.grid(), "f_res_line_dropped");
  return detail::f_res_ten_term(u) - f_res_closed_line(u);
}

inline SpectralField f_res(const SpectralField& u) {
  return u.grid().torus() ? f_res_closed_torus(u) : f_res_closed_line(u);
}

// ---- F_osc, the time antiderivative of f_osc ----

enum class Anchor {
  ZeroMean,      // -e^{it phi}/phi: zero time average (torus definition)
  ZeroAtOrigin,  // -(e^{it phi}-1)/phi: vanishes at t = 0 (line formula)
};

inline Anchor default_anchor(const FrequencyGrid& g) { return g.torus() ? Anchor::ZeroMean : Anchor::ZeroAtOrigin; }

inline cplx fosc_weight(const FrequencyGrid& g, double t, Anchor a, int k, int l, int m, int j) {
  if (phase_vanishes(g, k, l, m, j)) return {};
  const double ph = phase(g, k, l, m, j);
  if (a == Anchor::ZeroMean) return -std::polar(1.0, t * ph) / ph;
  const double s = std::sin(0.5 * t * ph);
  return -cplx(-2.0 * s * s, std::sin(t * ph)) / ph;
}

inline SpectralField F_osc_sum(const SpectralField& u, double t, Anchor a) {
  const auto& g = u.grid();
  return trilinear_sum(u, u, u, [&](int k, int l, int m, int j) { return fosc_weight(g, t, a, k, l, m, j); });
}

// Hardy input on the torus: only k < 0 outputs are non-resonant, all with phase -2k.
inline SpectralField F_osc_torus_hardy(const SpectralField& w, double t) {
  detail::require_torus(w.grid(), "F_osc_torus_hardy");
  detail::require_hardy(w, "F_osc_torus_hardy");
  const auto c = cubic(project_plus(w));
  SpectralField out(w.grid());
  for (int k = -w.n_max(); k < 0; ++k) out[k] = std::polar(1.0, -2.0 * k * t) / (2.0 * k) * c[k];
  return out;
}

inline SpectralField F_osc_torus(const SpectralField& u, double t) {
  detail::require_torus(u.grid(), "F_osc_torus");
  if (negative_mass(u) == 0.0) return F_osc_torus_hardy(u, t);
  return F_osc_sum(u, t, Anchor::ZeroMean);
}

inline SpectralField F_osc_line(const SpectralField& w, double t) {
  detail::require_box(w.grid(), "F_osc_line");
  detail::require_hardy(w, "F_osc_line");
  const auto& g = w.grid();
  const auto c = cubic(project_plus(w));
  SpectralField out(g);
  for (int k = -g.n_max(); k < 0; ++k) {
    const double xi = g.freq(k);
    const double s = std::sin(t * xi);
    // e^{-2it xi} - 1 = -2 sin^2(t xi) - i sin(2 t xi)
    const cplx num(-2.0 * s * s, -std::sin(2.0 * t * xi));
    out[k] = num / (2.0 * xi) * c[k];
  }
  return out;
}

inline SpectralField F_osc(const SpectralField& u, double t) {
  if (u.grid().torus()) return F_osc_torus(u, t);
  if (negative_mass(u) <= 1e-12) return F_osc_line(u, t);
  return F_osc_sum(u, t, Anchor::ZeroAtOrigin);
}

// R-linear derivative of F_osc at u in direction h
inline SpectralField dF_osc(const SpectralField& u, double t, const SpectralField& h, Anchor a) {
  const auto& g = u.grid();
  return quad_sum(g, [&](int k, int l, int m, int j) -> cplx {
    const cplx wt = fosc_weight(g, t, a, k, l, m, j);
    if (wt == cplx{}) return {};
    return wt * (h[j] * u[l] * std::conj(u[m]) + u[j] * h[l] * std::conj(u[m]) + u[j] * u[l] * std::conj(h[m]));
  });
}

inline SpectralField dF_osc(const SpectralField& u, double t, const SpectralField& h) {
  return dF_osc(u, t, h, default_anchor(u.grid()));
}

// f'(u,t).h = -i e^{i|D|t}(2|a|^2 b + a^2 conj(b)),  a = e^{-i|D|t}u, b = e^{-i|D|t}h
inline SpectralField fprime_dot(const SpectralField& u, double t, const SpectralField& h) {
  const int m = padded_size(u.grid());
  auto pa = detail::to_physical_m(free_flow(u, t), m);
  auto pb = detail::to_physical_m(free_flow(h, t), m);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const cplx a = pa[i], b = pb[i];
    pa[i] = 2.0 * std::norm(a) * b + a * a * std::conj(b);
  }
  return free_flow(-I * from_physical(std::move(pa), u.grid()), -t);
}

// ---- quintic terms of f'(W,t).F_osc(W,t) ----

struct ModeRef {
  int mode;
  bool conjugated;
};

struct KernelTerm {
  int output_mode;
  std::array<ModeRef, 5> input_modes;
  double phase;  // total phase; the term carries e^{it phase}
  cplx weight;   // coefficient times the product of input amplitudes
};

// Enumerates, for output mode k, every summand of f'(W,t).F_osc(W,t) on the
// torus: the two holomorphic slots of f' receiving F_osc (factor 2) and the
// conjugated slot.  Order is lexicographic in (l, m, n, p), first family first.
template <class Visitor>
void for_each_quintic_term(const SpectralField& w, int k, Visitor&& visit) {
  const int n = w.n_max();
  auto in = [n](int x) { return x >= -n && x <= n; };
  for (int l = -n; l <= n; ++l) {
    for (int m = -n; m <= n; ++m) {
      const int j = k - l + m;
      if (!in(j)) continue;
      const int phi1 = std::abs(k) - std::abs(l) + std::abs(m) - std::abs(j);
      const cplx wl = w[l], wm_bar = std::conj(w[m]);
      // h = F_osc in slot j
      for (int nn = -n; nn <= n; ++nn) {
        for (int p = -n; p <= n; ++p) {
          const int q = j - nn + p;
          if (!in(q)) continue;
          const int phi2 = std::abs(j) - std::abs(nn) + std::abs(p) - std::abs(q);
          if (phi2 == 0) continue;
          const cplx amp = w[nn] * w[q] * std::conj(w[p]) * wl * wm_bar;
          visit(KernelTerm{k, {{{nn, false}, {q, false}, {p, true}, {l, false}, {m, true}}}, double(phi1 + phi2),
                           2.0 * I / double(phi2) * amp});
        }
      }
    }
  }
  for (int l = -n; l <= n; ++l) {
    for (int m = -n; m <= n; ++m) {
      const int j = k - l + m;
      if (!in(j)) continue;
      const int phi1 = std::abs(k) - std::abs(l) + std::abs(m) - std::abs(j);
      const cplx wjl = w[j] * w[l];
      // h = F_osc in the conjugated slot m
      for (int nn = -n; nn <= n; ++nn) {
        for (int p = -n; p <= n; ++p) {
          const int q = m - nn + p;
          if (!in(q)) continue;
          const int phi2 = std::abs(m) - std::abs(nn) + std::abs(p) - std::abs(q);
          if (phi2 == 0) continue;
          const cplx amp = wjl * std::conj(w[nn]) * std::conj(w[q]) * w[p];
          visit(KernelTerm{k, {{{j, false}, {l, false}, {nn, true}, {q, true}, {p, false}}}, double(phi1 - phi2),
                           I / double(phi2) * amp});
        }
      }
    }
  }
}

template <class PerTerm>
SpectralField quintic_sum(const SpectralField& w, PerTerm&& per_term) {
  detail::require_torus(w.grid(), "quintic kernel");
  const int n = w.n_max();
  SpectralField out(w.grid());
  parallel_for(w.grid().size(), [&](int ik) {
    cplx acc{};
    for_each_quintic_term(w, ik - n, [&](const KernelTerm& t) { acc += per_term(t); });
    out[ik - n] = acc;
  });
  return out;
}

// resonant part {f'(W,t).F_osc(W,t)}_res, time independent
inline SpectralField r2_bruteforce(const SpectralField& w) {
  return quintic_sum(w, [](const KernelTerm& t) { return t.phase == 0.0 ? t.weight : cplx{}; });
}

// f'(W,t).F_osc(W,t) summed term by term (cross-check for fprime_dot)
inline SpectralField quintic_field(const SpectralField& w, double t) {
  return quintic_sum(w, [t](const KernelTerm& term) { return term.weight * std::polar(1.0, t * term.phase); });
}

// -i Pi+(|W|^2 g) - (i/2) Pi+(W^2 conj g),  g = (1/D) Pi-(|W|^2 W)
inline SpectralField r2_closed_hardy(const SpectralField& w) {
  detail::require_torus(w.grid(), "r2_closed_hardy");
  detail::require_hardy(w, "r2_closed_hardy");
  const auto wp = project_plus(w);
  const auto g = apply_inv_D_minus(project_minus(cubic(wp)));
  SpectralField out = -I * project_plus(product3(wp, g, wp));
  out.axpy(-0.5 * I, project_plus(product3(wp, wp, g)));
  return out;
}

// Zero-mean antiderivative in t of {f'(W,t).F_osc(W,t)}_osc - dF_osc(W,t; f_res(W)).
inline SpectralField n2_field(const SpectralField& w, double t) {
  auto osc = quintic_sum(w, [t](const KernelTerm& term) -> cplx {
    if (term.phase == 0.0) return {};
    return term.weight * std::polar(1.0, t * term.phase) / (I * term.phase);
  });
  const auto& g = w.grid();
  const auto h = f_res_closed_torus(w);
  // every summand of dF_osc(W,t;h) is e^{it phi}-oscillating with phi != 0
  auto lin = quad_sum(g, [&](int k, int l, int m, int j) -> cplx {
    if (phase_vanishes(g, k, l, m, j)) return {};
    const double ph = phase(g, k, l, m, j);
    const cplx wt = -std::polar(1.0, t * ph) / (I * ph * ph);
    return wt * (h[j] * w[l] * std::conj(w[m]) + w[j] * h[l] * std::conj(w[m]) + w[j] * w[l] * std::conj(h[m]));
  });
  return osc - lin;
}

}  // namespace szego
