#include "catch_amalgamated.hpp"

#include <szego/initial_data.hpp>
#include <szego/resonance.hpp>

#include <cmath>
#include <iostream>
#include <numbers>

using namespace szego;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

double rel_err(const SpectralField& a, const SpectralField& b) {
  return l2_norm(a - b) / std::max(l2_norm(b), 1e-300);
}

// least-squares slope, written out here so the tests do not lean on the experiments module
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size(), my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

// smoother random fields for finite-difference checks
SpectralField tapered(const FrequencyGrid& g, std::uint64_t seed, bool hardy = false) {
  auto f = random_field(g, seed, hardy);
  for (int k = -g.n_max(); k <= g.n_max(); ++k) f[k] *= std::exp(-0.25 * std::abs(k));
  return f;
}

}  // namespace

TEST_CASE("phase function", "[phase]") {
  auto g = torus_grid(8);
  CHECK(phase(g, 1, 1, 0, 0) == 0.0);
  CHECK(phase(g, 2, 1, 1, 2) == 0.0);
  CHECK(phase(g, 0, 1, 0, -1) == -2.0);
  auto b = make_grid(8, Domain::BigBox, 16 * pi);
  CHECK(phase(b, 0, 1, 0, -1) == Approx(-0.25));
}

TEST_CASE("resonance predicates", "[resonance]") {
  CHECK(is_resonant_torus(1, 1, -3, -3));
  CHECK_FALSE(is_resonant_torus(0, 1, 0, -1));
  CHECK_THROWS_AS(is_resonant_torus(1, 0, 0, 0), std::invalid_argument);
  auto b = make_grid(8, Domain::BigBox, 64 * pi);
  CHECK(is_resonant_line(b, 1, 2, 3, 2));
  CHECK(is_resonant_line(b, -3, 5, 5, -3));
  CHECK(is_resonant_line(b, -2, -2, 4, 4));
  CHECK_THROWS_AS(is_resonant_line(b, 1, 0, 0, 0), std::invalid_argument);

  SECTION("exhaustive agreement with vanishing phase, n_max = 8") {
    const int n = 8;
    auto t = torus_grid(n);
    int feasible = 0, bad_t = 0, bad_l = 0;
    for (int k = -n; k <= n; ++k)
      for (int l = -n; l <= n; ++l)
        for (int m = -n; m <= n; ++m) {
          int j = k - l + m;
          if (j < -n || j > n) continue;
          ++feasible;
          if (is_resonant_torus(k, l, m, j) != phase_vanishes(t, k, l, m, j)) ++bad_t;
          if (is_resonant_line(b, k, l, m, j) != phase_vanishes(b, k, l, m, j)) ++bad_l;
        }
    CHECK(feasible == 3281);  // #{(k,l,m) in [-8,8]^3 : |k-l+m| <= 8}
    CHECK(bad_t == 0);
    CHECK(bad_l == 0);
  }
}

TEST_CASE("resonant part by brute force", "[fres]") {
  auto g = torus_grid(8);
  auto r = f_res_bruteforce(single_mode(g, 1));
  CHECK(std::abs(r[1] - (-I)) < 1e-15);
  CHECK(l2_norm(r) == Approx(1.0));

  auto two = single_mode(g, 1) + single_mode(g, -1);
  auto r2 = f_res_bruteforce(two);
  CHECK(std::abs(r2[1] - (-3.0 * I)) < 1e-14);
  CHECK(std::abs(r2[-1] - (-3.0 * I)) < 1e-14);
  CHECK(l2_norm(f_res_bruteforce(SpectralField(g))) == 0.0);
}

TEST_CASE("ten-term torus formula equals brute force", "[fres][closed]") {
  auto g = torus_grid(8);
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    auto u = random_field(g, seed);
    CHECK(max_abs_diff(f_res_closed_torus(u), f_res_bruteforce(u)) < 1e-12);
  }
  auto h = random_field(g, 7, true);
  CHECK(max_abs_diff(f_res_closed_torus(h), -I * project_plus(cubic(h))) < 1e-14);
  auto e = f_res_closed_torus(single_mode(g, -1));
  CHECK(std::abs(e[-1] - (-I)) < 1e-15);
  CHECK(l2_norm(e) == Approx(1.0));
  CHECK_THROWS(f_res_closed_torus(SpectralField(make_grid(8, Domain::BigBox, 8 * pi))));
}

TEST_CASE("two-term line formula and its dropped set", "[fres][line]") {
  auto b = make_grid(8, Domain::BigBox, 64 * pi);
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    auto u = random_field(b, seed);
    auto closed = f_res_closed_line(u);
    CHECK(max_abs_diff(closed, f_res_line_region_bruteforce(u)) < 1e-12);
    // the full discrete resonant sum is the closed form plus the dropped set
    auto full = f_res_bruteforce(u);
    CHECK(max_abs_diff(full, closed + f_res_line_dropped(u)) < 1e-12);
  }
  auto h = random_field(b, 3, true);
  CHECK(max_abs_diff(f_res_closed_line(h), -I * project_plus(cubic(h))) < 1e-14);
  CHECK(l2_norm(f_res_line_dropped(h)) < 1e-15);
  CHECK(l2_norm(f_res_closed_line(SpectralField(b))) == 0.0);
}

TEST_CASE("splitting of the nonlinearity", "[split]") {
  auto g = torus_grid(8);
  auto one = f_full(single_mode(g, 1), 0.0);
  CHECK(std::abs(one[1] - (-I)) < 1e-15);
  auto s = single_mode(g, 3, cplx(0.5, 0.2));
  const double n0 = l2_norm(f_full(s, 0.0));
  for (double t : {0.3, 2.0, 17.0}) CHECK(l2_norm(f_full(s, t)) == Approx(n0).epsilon(1e-14));
  CHECK(l2_norm(f_osc(s, 0.9)) < 1e-16);

  for (auto grid : {g, make_grid(8, Domain::BigBox, 64 * pi)}) {
    auto u = random_field(grid, 31);
    for (double t : {0.0, 0.1, 0.37, 1.0, 10.0}) {
      auto split = f_res_bruteforce(u) + f_osc(u, t);
      CHECK(l2_norm(f_full(u, t) - split) < 1e-10);
    }
  }
}

TEST_CASE("time averages on the torus", "[average]") {
  const int n = 8, R = 8 * n;
  auto g = torus_grid(n);
  auto u = random_field(g, 41);
  SpectralField avg_full(g), avg_osc(g);
  for (int r = 0; r < R; ++r) {
    const double t = 2 * pi * r / R;
    avg_full.axpy(1.0 / R, f_full(u, t));
    avg_osc.axpy(1.0 / R, f_osc(u, t));
  }
  CHECK(max_abs_diff(avg_full, f_res_bruteforce(u)) < 1e-13);
  CHECK(l2_norm(avg_osc) < 1e-13);
}

TEST_CASE("symmetries of the resonant part", "[fres]") {
  auto g = torus_grid(8);
  auto u = random_field(g, 55);
  const cplx rot = std::polar(1.0, 0.83);
  CHECK(max_abs_diff(f_res_closed_torus(rot * u), rot * f_res_closed_torus(u)) < 1e-14);
  CHECK(max_abs_diff(f_res_closed_torus(1.7 * u), std::pow(1.7, 3) * f_res_closed_torus(u)) < 1e-13);
  auto w = random_field(torus_grid(6), 56, true);
  CHECK(max_abs_diff(r2_bruteforce(1.3 * w), std::pow(1.3, 5) * r2_bruteforce(w)) < 1e-12);
  CHECK(max_abs_diff(r2_closed_hardy(1.3 * w), std::pow(1.3, 5) * r2_closed_hardy(w)) < 1e-12);
}

TEST_CASE("oscillatory antiderivative on the torus", "[fosc]") {
  auto g = torus_grid(8);
  CHECK(l2_norm(F_osc_torus(single_mode(g, 2, 3.0), 1.1)) < 1e-14);
  CHECK(l2_norm(F_osc_sum(single_mode(g, -2, 3.0), 1.1, Anchor::ZeroMean)) == 0.0);

  SECTION("d/dt F_osc = f_osc") {
    auto u = tapered(g, 61);
    const double t = 0.5, h = 1e-4;
    auto fd = (1.0 / (2 * h)) * (F_osc_torus(u, t + h) - F_osc_torus(u, t - h));
    CHECK(rel_err(fd, f_osc(u, t)) < 1e-6);
  }

  SECTION("Hardy fast path equals the generic sum") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto w = random_field(g, seed, true);
      for (double t : {0.0, 0.4, 3.3})
        CHECK(max_abs_diff(F_osc_torus_hardy(w, t), F_osc_sum(w, t, Anchor::ZeroMean)) < 1e-13);
    }
  }

  SECTION("zero time average") {
    auto u = random_field(g, 62);
    SpectralField avg(g);
    const int R = 64;
    for (int r = 0; r < R; ++r) avg.axpy(1.0 / R, F_osc_torus(u, 2 * pi * r / R));
    CHECK(l2_norm(avg) < 1e-13);
  }

  SECTION("time-uniform H^1 bound, measured constant") {
    double c = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto u = random_field(g, seed);
      const double w3 = std::pow(sobolev_norm(u, 1.0), 3);
      for (double t : {0.0, 0.7, 5.0, 50.0}) c = std::max(c, sobolev_norm(F_osc_torus(u, t), 1.0) / w3);
    }
    std::cout << "[fosc] measured C_1 for |F_osc|_H1 <= C |u|_H1^3 on torus n_max=8: " << c << "\n";
    CHECK(c < 10.0);
  }
}

TEST_CASE("oscillatory antiderivative on the box", "[fosc][line]") {
  auto b = make_grid(8, Domain::BigBox, 64 * pi);
  auto w = random_field(b, 71, true);
  CHECK(l2_norm(F_osc_line(w, 0.0)) == 0.0);
  for (double t : {0.3, 4.0, 60.0}) {
    CHECK(max_abs_diff(F_osc_line(w, t), F_osc_sum(w, t, Anchor::ZeroAtOrigin)) < 1e-10);
    // the zero-mean anchor is a different antiderivative
    CHECK(max_abs_diff(F_osc_line(w, t), F_osc_sum(w, t, Anchor::ZeroMean)) > 1e-3);
  }
  CHECK_THROWS(F_osc_line(random_field(b, 72), 1.0));
  CHECK_THROWS(F_osc_line(single_mode(torus_grid(8), 1), 1.0));

  SECTION("ZeroAtOrigin anchor differentiates to f_osc") {
    auto u = tapered(b, 73);
    const double t = 2.0, h = 1e-3;
    auto fd = (1.0 / (2 * h)) * (F_osc_sum(u, t + h, Anchor::ZeroAtOrigin) - F_osc_sum(u, t - h, Anchor::ZeroAtOrigin));
    CHECK(rel_err(fd, f_osc(u, t)) < 1e-6);
  }

  SECTION("square-root growth of the L2 norm for t in [10, 1000]") {
    // L/8 > 1000 keeps the sampled window inside the faithful range
    auto big = make_grid(int(20.0 * 2048), Domain::BigBox, 4096 * pi);
    InitialDataSpec spec;
    spec.kind = DataKind::PoissonBump;
    auto wb = make_initial_data(spec, big);
    std::vector<double> lt, ln;
    for (int i = 0; i <= 12; ++i) {
      const double t = 10.0 * std::pow(100.0, i / 12.0);
      lt.push_back(std::log(t));
      ln.push_back(std::log(l2_norm(F_osc_line(wb, t))));
    }
    const double slope = ls_slope(lt, ln);
    std::cout << "[fosc] box L=4096pi growth exponent on [10,1000]: " << slope << "\n";
    CHECK(slope >= 0.4);
    CHECK(slope <= 0.6);
  }
}

TEST_CASE("directional derivatives", "[derivative]") {
  auto g = torus_grid(8);
  auto u = tapered(g, 81);
  auto h = tapered(g, 82);
  SpectralField zero(g);
  const double t = 0.45, d = 1e-5;
  CHECK(l2_norm(dF_osc(u, t, zero)) == 0.0);
  CHECK(l2_norm(fprime_dot(u, t, zero)) == 0.0);

  for (cplx dir : {cplx(1, 0), cplx(0, 1)}) {
    auto hd = dir * h;
    auto fd_F = (1.0 / (2 * d)) * (F_osc_torus(u + d * hd, t) - F_osc_torus(u - d * hd, t));
    CHECK(rel_err(fd_F, dF_osc(u, t, hd)) < 1e-6);
    auto fd_f = (1.0 / (2 * d)) * (f_full(u + d * hd, t) - f_full(u - d * hd, t));
    CHECK(rel_err(fd_f, fprime_dot(u, t, hd)) < 1e-6);
  }
  // R-linear, not C-linear: the conjugated slot breaks i-homogeneity
  CHECK(l2_norm(dF_osc(u, t, I * h) - I * dF_osc(u, t, h)) > 1e-6);

  auto b = make_grid(8, Domain::BigBox, 64 * pi);
  auto ub = tapered(b, 83), hb = tapered(b, 84);
  auto fd_b = (1.0 / (2 * d)) * (F_osc_sum(ub + d * hb, 3.0, Anchor::ZeroAtOrigin) - F_osc_sum(ub - d * hb, 3.0, Anchor::ZeroAtOrigin));
  CHECK(rel_err(fd_b, dF_osc(ub, 3.0, hb)) < 1e-6);

  SECTION("single-mode base point") {
    const cplx a(0.7, -0.2), c(0.3, 0.4);
    auto s = single_mode(g, 2, a);
    auto hs = single_mode(g, 2, c);
    CHECK(l2_norm(dF_osc(s, 1.3, hs)) == 0.0);
    // f(u) = -i|a|^2 a on one mode, so f'.h = -i(2|a|^2 c + a^2 conj(c)) on that mode
    auto fp = fprime_dot(s, 1.3, hs);
    CHECK(std::abs(fp[2] - (-I * (2.0 * std::norm(a) * c + a * a * std::conj(c)))) < 1e-15);
    CHECK(l2_norm(fp) == Approx(std::abs(fp[2])));
  }
}

TEST_CASE("quintic resonant term", "[r2]") {
  SECTION("hand enumeration for W = 1 + e^{ix}") {
    // |W|^2 W = 3 + 3z + z^2 + conj(z),  g = (1/D)Pi-(...) = -conj(z)
    // -i Pi+(|W|^2 g) = i,  -(i/2) Pi+(W^2 conj(g)) = (i/2)(z + 2 z^2 + z^3)
    auto g = torus_grid(4);
    auto w = single_mode(g, 0) + single_mode(g, 1);
    SpectralField expect(g);
    expect[0] = I;
    expect[1] = 0.5 * I;
    expect[2] = I;
    expect[3] = 0.5 * I;
    CHECK(max_abs_diff(r2_closed_hardy(w), expect) < 1e-15);
    CHECK(max_abs_diff(r2_bruteforce(w), expect) < 1e-14);
  }

  auto g = torus_grid(8);
  CHECK(l2_norm(r2_closed_hardy(single_mode(g, 1))) < 1e-16);
  CHECK(l2_norm(r2_bruteforce(single_mode(g, 3, 2.0))) == 0.0);
  CHECK(l2_norm(r2_bruteforce(single_mode(g, -3, 2.0))) == 0.0);
  CHECK_THROWS(r2_closed_hardy(random_field(g, 5)));

  SECTION("closed form equals the sextuple sums on Hardy fields") {
    for (std::uint64_t seed = 300; seed < 320; ++seed) {
      auto w = random_field(g, seed, true);
      CHECK(max_abs_diff(r2_closed_hardy(w), r2_bruteforce(w)) < 1e-12);
    }
  }

  SECTION("time average of f'.F_osc") {
    const int n = 6, R = 8 * n;
    auto g6 = torus_grid(n);
    for (bool hardy : {true, false}) {
      auto w = random_field(g6, 91, hardy);
      SpectralField avg(g6);
      for (int r = 0; r < R; ++r) {
        const double t = 2 * pi * r / R;
        avg.axpy(1.0 / R, fprime_dot(w, t, F_osc_torus(w, t)));
      }
      CHECK(max_abs_diff(avg, r2_bruteforce(w)) < 1e-8);
    }
  }

  SECTION("term enumeration reproduces f'.F_osc pointwise in t") {
    auto g6 = torus_grid(6);
    auto w = random_field(g6, 92);
    for (double t : {0.0, 0.8, 2.9}) CHECK(max_abs_diff(quintic_field(w, t), fprime_dot(w, t, F_osc_torus(w, t))) < 1e-12);
  }

  SECTION("quintic bound, measured constant") {
    auto g6 = torus_grid(6);
    double c = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      auto w = random_field(g6, seed, true);
      c = std::max(c, sobolev_norm(r2_bruteforce(w), 1.0) / std::pow(sobolev_norm(w, 1.0), 5));
    }
    std::cout << "[r2] measured C for |R2|_H1 <= C |W|_H1^5, n_max=6: " << c << "\n";
    CHECK(c < 10.0);
  }
}

TEST_CASE("second-order correction N2", "[n2]") {
  auto g = torus_grid(6);
  CHECK(l2_norm(n2_field(single_mode(g, 2, 1.5), 0.4)) < 1e-14);

  auto w = tapered(g, 101, true);
  SECTION("time derivative matches its defining right-hand side") {
    const double t = 0.3, h = 1e-4;
    auto fd = (1.0 / (2 * h)) * (n2_field(w, t + h) - n2_field(w, t - h));
    auto rhs = fprime_dot(w, t, F_osc_torus(w, t)) - r2_bruteforce(w) - dF_osc(w, t, f_res_closed_torus(w));
    CHECK(rel_err(fd, rhs) < 1e-6);
  }
  SECTION("zero mean over one period") {
    const int R = 48;
    auto u = random_field(g, 102);
    SpectralField avg(g);
    for (int r = 0; r < R; ++r) avg.axpy(1.0 / R, n2_field(u, 2 * pi * r / R));
    CHECK(l2_norm(avg) < 1e-10);
  }
}
