#include "catch_amalgamated.hpp"

#include <szego/experiments.hpp>

#include <cmath>
#include <numbers>

using namespace szego;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

ExperimentPlan single_mode_plan(ExperimentKind kind) {
  auto p = default_plan(kind);
  p.initial_data.modes = {{1, 1.0}};
  return p;
}

// small box so the BigBox path runs in well under a second
ExperimentPlan small_box_plan() {
  auto p = default_plan(ExperimentKind::Scaling1R);
  p.length = 16 * pi;
  p.n_max = 80;
  p.eps_list = {0.4, 0.3, 0.2};
  return p;
}

}  // namespace

TEST_CASE("horizon and step rules", "[plan]") {
  auto p = default_plan(ExperimentKind::Scaling1T);
  CHECK(horizon(p, 0.1) == Approx(50.0).epsilon(1e-15));
  CHECK(horizon(p, 0.0) == 0.0);
  CHECK(step_size(p, 0.2) == Approx(0.05));
  CHECK(step_size(p, 0.5) == Approx(0.008));

  p.horizon_mode = HorizonMode::LogCorrected;
  for (double alpha : {0.0, 0.25, 0.5})
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
      p.alpha = alpha;
      const double law = std::pow(p.delta * std::log(1.0 / eps), 1.0 - 2.0 * alpha) / (eps * eps);
      CHECK(horizon(p, eps) == Approx(law).epsilon(1e-14));
    }
  p.alpha = 0;
  p.slow_time_cap = 0.2;
  CHECK(horizon(p, 0.025) == Approx(0.2 / (0.025 * 0.025)));
}

TEST_CASE("plan validation", "[plan]") {
  auto p = default_plan(ExperimentKind::Scaling1T);
  CHECK_NOTHROW(validate(p));
  p.eps_list = {0.2, 0.1};
  CHECK_THROWS_AS(validate(p), ConfigError);
  p.eps_list = {0.1, 0.2, 0.05};
  CHECK_THROWS_AS(validate(p), ConfigError);
  p.eps_list = {0.9, 0.2, 0.1};
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = default_plan(ExperimentKind::Scaling1R);
  p.domain = Domain::Torus;
  p.length = 2 * pi;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = default_plan(ExperimentKind::Scaling1T);
  p.alpha = 0.7;
  CHECK_THROWS_AS(validate(p), ConfigError);
}

TEST_CASE("log-log fit", "[fit]") {
  std::vector<std::pair<double, double>> cube, quint;
  for (double e : {0.2, 0.1, 0.05, 0.025}) {
    cube.emplace_back(e, e * e * e);
    quint.emplace_back(e, 7.0 * std::pow(e, 5));
  }
  auto f3 = fit_loglog(cube);
  CHECK(f3.slope == Approx(3.0).epsilon(1e-12));
  CHECK(f3.residual < 1e-12);
  auto f5 = fit_loglog(quint);
  CHECK(f5.slope == Approx(5.0).epsilon(1e-12));
  CHECK(f5.intercept == Approx(std::log(7.0)).epsilon(1e-12));

  CHECK_THROWS_AS(fit_loglog({{0.2, 1.0}, {0.1, 0.5}}), ConfigError);
  // unusable rows do not count toward the minimum
  CHECK_THROWS_AS(fit_loglog({{0.2, 1.0}, {0.1, 0.5}, {0.05, std::nan("")}}), ConfigError);

  auto fz = fit_loglog({{0.2, 1e-3}, {0.1, 0.0}, {0.05, 1e-5}});
  CHECK(fz.floored == 1);
  CHECK(std::isfinite(fz.slope));

  // noisy data: residual is the RMS deviation in log space
  auto fn = fit_loglog({{1.0, 1.0}, {std::exp(1.0), std::exp(1.0 + 0.1)}, {std::exp(2.0), std::exp(2.0)}});
  CHECK(fn.slope == Approx(1.0).epsilon(1e-12));
  CHECK(fn.residual == Approx(std::sqrt((0.1 / 3 * 0.1 / 3 * 2 + 0.2 / 3 * 0.2 / 3) / 3)).epsilon(1e-10));
}

TEST_CASE("single-mode data is solved exactly", "[scaling]") {
  // v = eps e^{-it(1+eps^2)} e^{ix} and W = e^{-i eps^2 t} e^{ix}; both flows see the same rotation
  auto p = single_mode_plan(ExperimentKind::Scaling1T);
  p.eps_list = {0.2, 0.1, 0.05};
  auto r = run_scaling_first_order_torus(p);
  REQUIRE(r.rows.size() == 3);
  for (auto& row : r.rows) {
    CHECK(row.sup_error <= 1e-9);
    CHECK(row.sup_w_norm == Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK_FALSE(row.failed);
  }

  auto q = single_mode_plan(ExperimentKind::Scaling2T);
  q.eps_list = {0.2, 0.14, 0.1};
  auto s = run_scaling_second_order(q);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s.second.rows[i].sup_error <= 1e-9);
    CHECK(s.first.rows[i].sup_error <= 1e-9);
  }

  auto y = single_mode_plan(ExperimentKind::YvsU);
  auto ry = run_y_vs_u(y);
  for (auto& row : ry.rows) CHECK(row.sup_error <= 1e-9);
}

TEST_CASE("eps = 0 row is trivial", "[scaling]") {
  auto p = default_plan(ExperimentKind::Scaling1T);
  auto row = detail::first_order_row(p, 0.0);
  CHECK(row.sup_error == 0.0);
  CHECK(row.horizon == 0.0);
  auto two = detail::second_order_row(default_plan(ExperimentKind::Scaling2T), 0.0);
  CHECK(two.a.sup_error == 0.0);
  CHECK(two.b.sup_error == 0.0);
  CHECK(detail::y_vs_u_row(default_plan(ExperimentKind::YvsU), 0.0).sup_error == 0.0);
}

TEST_CASE("first-order torus sweep", "[scaling]") {
  auto p = default_plan(ExperimentKind::Scaling1T);
  p.eps_list = {0.2, 0.1, 0.05};
  auto r = run_scaling_first_order_torus(p);
  REQUIRE(r.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.rows[i].eps == p.eps_list[i]);
    CHECK(r.rows[i].horizon == Approx(0.5 / (p.eps_list[i] * p.eps_list[i])));
    CHECK_FALSE(r.rows[i].flagged);
    CHECK(r.rows[i].sup_w_norm >= sobolev_norm(make_initial_data(p.initial_data, p.grid()), 1.0) - 1e-12);
  }
  CHECK(r.fit_ok);
  CHECK(r.fitted_slope >= 2.7);
  CHECK(r.passed);

  SECTION("identical plans give identical reports") {
    auto again = run_scaling_first_order_torus(p);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(again.rows[i].sup_error == r.rows[i].sup_error);
      CHECK(again.rows[i].sup_w_norm == r.rows[i].sup_w_norm);
    }
    CHECK(again.fitted_slope == r.fitted_slope);
  }

  SECTION("hypothesis monitor flags rows") {
    p.norm_growth_limit = 0.5;
    auto f = run_scaling_first_order_torus(p);
    for (auto& row : f.rows) CHECK(row.flagged);
  }
}

TEST_CASE("rows survive integrator blow-up", "[scaling]") {
  auto p = default_plan(ExperimentKind::Scaling1T);
  p.eps_list = {0.5, 0.4, 0.3};
  p.initial_data.normalization = 12.0;
  p.dt_max = 0.5;
  p.slow_resolution = 1.0;
  auto r = run_scaling_first_order_torus(p);
  REQUIRE(r.rows.size() == 3);
  for (auto& row : r.rows) {
    CHECK(row.failed);
    CHECK(row.flagged);
    CHECK_FALSE(row.note.empty());
  }
  CHECK_FALSE(r.fit_ok);
  CHECK_FALSE(r.passed);
}

TEST_CASE("box sweep carries the caveat and diagnostic", "[scaling]") {
  auto r = run_scaling_first_order_box(small_box_plan());
  REQUIRE(r.rows.size() == 3);
  bool caveat = false;
  for (auto& n : r.notes) caveat = caveat || n.find("APPROXIMATE") != std::string::npos;
  CHECK(caveat);
  for (auto& row : r.rows) {
    CHECK(row.note.rfind("diagonal_diagnostic=", 0) == 0);
    CHECK(row.sup_error > 0);
  }
  CHECK(r.fit_ok);
}

TEST_CASE("second-order sweep improves on first order", "[scaling]") {
  auto p = default_plan(ExperimentKind::Scaling2T);
  p.eps_list = {0.2, 0.14, 0.1};
  auto r = run_scaling_second_order(p);
  CHECK(r.monotone);
  for (std::size_t i = 0; i < 3; ++i) CHECK(r.second.rows[i].sup_error < r.first.rows[i].sup_error);
  CHECK(r.second.fitted_slope >= 4.3);
  CHECK(r.second.fitted_slope - r.first.fitted_slope >= 1.5);
  CHECK(r.passed);
}

TEST_CASE("Y versus U", "[scaling]") {
  auto p = default_plan(ExperimentKind::YvsU);
  p.eps_list = {0.2, 0.14, 0.1};
  auto r = run_y_vs_u(p);
  CHECK(r.fitted_slope >= 1.7);
  CHECK(r.fitted_slope == Approx(2.0).margin(0.1));
}

TEST_CASE("conservation report", "[conservation]") {
  auto p = default_plan(ExperimentKind::Conservation);
  p.t_end = 20;

  SECTION("full flow, short run") {
    auto r = run_conservation(p);
    CHECK(r.times.size() == 21);
    CHECK(r.drift_energy <= 1e-8);
    CHECK(r.drift_mass <= 1e-8);
    CHECK(r.drift_momentum <= 1e-8);
  }
  SECTION("first-order flow keeps Q, M and stays Hardy") {
    p.flow = Flow::FirstOrderRG;
    p.t_end = 200;
    auto r = run_conservation(p);
    CHECK(r.drift_mass <= 1e-8);
    CHECK(r.drift_momentum <= 1e-8);
  }
  SECTION("zero field") {
    p.initial_data.normalization = 0.0;
    auto r = run_conservation(p);
    CHECK(r.drift_energy == 0.0);
    CHECK(r.drift_mass == 0.0);
    CHECK(r.drift_momentum == 0.0);
  }
}

TEST_CASE("F_osc growth dichotomy", "[growth]") {
  SECTION("box: square-root law inside the window") {
    auto r = run_fosc_growth(default_plan(ExperimentKind::FoscGrowth));
    CHECK(r.window_hi == Approx(32 * pi));
    CHECK(r.exponent >= 0.4);
    CHECK(r.exponent <= 0.6);
    CHECK(r.passed);
    int in = 0;
    for (auto& row : r.rows) in += row.in_window;
    CHECK(in >= 5);
  }
  SECTION("torus: bounded") {
    auto p = default_plan(ExperimentKind::FoscGrowth);
    p.domain = Domain::Torus;
    p.length = 2 * pi;
    p.n_max = 32;
    auto r = run_fosc_growth(p);
    CHECK(r.exponent <= 0.05);
    CHECK(r.passed);
    double peak = 0;
    for (auto& row : r.rows) peak = std::max(peak, row.norm);
    CHECK(peak > 1e-3);
  }
  SECTION("torus, two-mode data: F_osc vanishes") {
    auto p = default_plan(ExperimentKind::FoscGrowth);
    p.domain = Domain::Torus;
    p.length = 2 * pi;
    p.n_max = 32;
    p.initial_data.kind = DataKind::HardyPolynomial;
    auto r = run_fosc_growth(p);
    CHECK(r.exponent <= 0.05);
    bool noted = false;
    for (auto& n : r.notes) noted = noted || n.find("vanishes") != std::string::npos;
    CHECK(noted);
  }
}

TEST_CASE("Sobolev growth study", "[growth]") {
  auto p = default_plan(ExperimentKind::SobolevGrowth);
  p.length = 64 * pi;
  p.n_max = 640;
  p.sample_every = 1.0;
  p.t_end = 30;

  SECTION("H^1/2 stays level") {
    p.s = 0.5;
    p.stop_at_boundary = false;
    auto r = run_sobolev_growth(p);
    CHECK(r.qualitative);
    REQUIRE(r.fit_ok);
    CHECK(std::abs(r.exponent) <= 0.05);
    CHECK(r.rows[1].norm / r.rows[0].norm == Approx(1.0).margin(1e-2));
  }
  SECTION("coarse grid trips the boundary warning") {
    p.n_max = 160;
    p.t_end = 60;
    auto r = run_sobolev_growth(p);
    CHECK_FALSE(r.warnings.empty());
    CHECK(r.window_hi < 60);
    CHECK(r.rows.back().t < 60);  // stopped at the boundary
  }
  SECTION("torus is rejected") {
    p.domain = Domain::Torus;
    p.length = 2 * pi;
    CHECK_THROWS_AS(run_sobolev_growth(p), ConfigError);
  }
}

TEST_CASE("kernel audit", "[audit]") {
  auto p = default_plan(ExperimentKind::KernelAudit);
  p.audit_fields = 4;
  auto r = run_kernel_audit(p);
  CHECK(r.all_passed);
  CHECK(r.rows.size() == 9);

  p.n_max = 4;
  auto small = run_kernel_audit(p);
  REQUIRE(small.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(small.rows[i].passed == r.rows[i].passed);

  p.negative_control = true;
  auto bad = run_kernel_audit(p);
  CHECK_FALSE(bad.all_passed);
  CHECK_FALSE(bad.rows.front().passed);
  CHECK(bad.rows.front().check == "f_res_closed_torus_vs_bruteforce");

  p.n_max = 11;
  CHECK_THROWS_AS(run_kernel_audit(p), ConfigError);
}
