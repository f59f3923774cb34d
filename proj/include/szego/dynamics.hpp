#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "resonance.hpp"

namespace szego {

enum class Flow { FullNLW, FirstOrderRG, SecondOrderAveraged };

inline const char* to_string(Flow f) {
  switch (f) {
    case Flow::FullNLW: return "full_nlw";
    case Flow::FirstOrderRG: return "first_order";
    case Flow::SecondOrderAveraged: return "second_order";
  }
  return "?";
}

struct FlowSpec {
  Flow flow = Flow::FullNLW;
  double eps = 0.1;
  double dt = 0.05;
  double t_end = 1.0;
  double s = 1.0;  // diagnostic norm index
  FrequencyGrid grid = torus_grid(32);
};

inline void validate(const FlowSpec& f) {
  // eps = 1 is the unscaled Szego flow used by the growth study; eps = 0 is the trivial row
  if (!(f.eps >= 0.0 && f.eps <= 1.0)) throw ConfigError("eps must lie in [0, 1]");
  if (!(f.dt > 0.0 && f.dt <= 0.5)) throw ConfigError("dt must lie in (0, 0.5]");
  if (!(f.t_end > 0.0) || !std::isfinite(f.t_end)) throw ConfigError("t_end must be positive");
  if (!(f.s >= 0.5)) throw ConfigError("s must be >= 1/2");
  if (f.flow == Flow::SecondOrderAveraged && !f.grid.torus()) throw ConfigError("second-order flow is defined on the torus only");
}

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  FlowSpec flow_spec;
};

struct BlowUpError : NumericGuard {
  BlowUpError(const std::string& what, Trajectory partial) : NumericGuard(what), partial(std::move(partial)) {}
  Trajectory partial;
};

// ---- right-hand sides ----

// dv/dt = -i|D|v - i|v|^2 v
inline SpectralField rhs_full_nlw(const SpectralField& v) {
  SpectralField out = -I * apply_abs_D(v);
  out.axpy(-I, cubic(v));
  return out;
}

inline SpectralField rhs_first_order(const SpectralField& w, double eps) {
  // identical to the general formula on Hardy fields, without its extra transforms
  if (negative_mass(w) == 0.0) return (-I * eps * eps) * project_plus(cubic(w));
  return (eps * eps) * f_res(w);
}

inline SpectralField rhs_second_order(const SpectralField& w, double eps) {
  detail::require_torus(w.grid(), "rhs_second_order");
  detail::require_hardy(w, "rhs_second_order");
  SpectralField out = (-I * eps * eps) * project_plus(cubic(w));
  out.axpy(std::pow(eps, 4), r2_closed_hardy(w));
  return out;
}

// ---- fixed-step integrator ----

// RK4 on the nonlinear part only.  For the full flow the state is z = e^{i|D|t}v,
// which obeys z' = f(z, t); the linear propagator is applied exactly on output.
class Stepper {
 public:
  Stepper(const FlowSpec& spec, const SpectralField& initial, bool nonlinear = true)
      : spec_(spec), y_(initial), nonlinear_(nonlinear) {
    validate(spec_);
    if (!(initial.grid() == spec_.grid)) throw ConfigError("initial data grid does not match the flow grid");
    total_ = std::max<long>(1, long(std::ceil(spec_.t_end / spec_.dt - 1e-9)));
    h_ = spec_.t_end / double(total_);
  }

  const FlowSpec& spec() const { return spec_; }
  double step_size() const { return h_; }
  long total_steps() const { return total_; }
  long steps_taken() const { return n_; }
  bool done() const { return n_ >= total_; }
  double time() const { return n_ == total_ ? spec_.t_end : double(n_) * h_; }

  // interaction-picture variable for the full flow, W otherwise
  const SpectralField& internal_state() const { return y_; }

  SpectralField state() const { return spec_.flow == Flow::FullNLW ? free_flow(y_, time()) : y_; }

  void step() {
    const double t = time();
    const auto k1 = rhs(y_, t);
    const auto k2 = rhs(y_ + (0.5 * h_) * k1, t + 0.5 * h_);
    const auto k3 = rhs(y_ + (0.5 * h_) * k2, t + 0.5 * h_);
    const auto k4 = rhs(y_ + h_ * k3, t + h_);
    y_.axpy(h_ / 6.0, k1);
    y_.axpy(h_ / 3.0, k2);
    y_.axpy(h_ / 3.0, k3);
    y_.axpy(h_ / 6.0, k4);
    ++n_;
  }

 private:
  SpectralField rhs(const SpectralField& y, double t) const {
    if (!nonlinear_) return SpectralField(y.grid());
    switch (spec_.flow) {
      case Flow::FullNLW: return f_full(y, t);
      case Flow::FirstOrderRG: return rhs_first_order(y, spec_.eps);
      case Flow::SecondOrderAveraged: return rhs_second_order(y, spec_.eps);
    }
    return SpectralField(y.grid());
  }

  FlowSpec spec_;
  SpectralField y_;
  bool nonlinear_;
  long total_ = 1, n_ = 0;
  double h_ = 0;
};

struct IntegrateOptions {
  double snapshot_every = 0.0;  // time units; <= 0 means 0.05 slow-time units
  bool nonlinear = true;        // test hook: linear-only run when false
  double blowup_factor = 1e3;
  std::function<void(double, const SpectralField&)> observer;  // every step, including t = 0
};

inline double default_snapshot_every(const FlowSpec& spec) {
  return spec.eps > 0 ? 0.05 / (spec.eps * spec.eps) : spec.t_end;
}

inline Trajectory integrate(const FlowSpec& spec, const SpectralField& v0, const IntegrateOptions& opt = {}) {
  Stepper st(spec, v0, opt.nonlinear);
  const double every = opt.snapshot_every > 0 ? opt.snapshot_every : default_snapshot_every(spec);
  const long stride = std::max<long>(1, std::lround(every / st.step_size()));
  const double norm0 = sobolev_norm(v0, 0.5);

  Trajectory traj;
  traj.flow_spec = spec;
  auto record = [&](double t, const SpectralField& v) {
    traj.times.push_back(t);
    traj.states.push_back(v);
  };
  record(0.0, v0);
  if (opt.observer) opt.observer(0.0, v0);
  while (!st.done()) {
    st.step();
    // H^{1/2} of v equals that of the interaction variable
    const double nrm = sobolev_norm(st.internal_state(), 0.5);
    const bool last = st.done();
    const bool snap = last || st.steps_taken() % stride == 0;
    if (!std::isfinite(nrm) || nrm > opt.blowup_factor * norm0) {
      throw BlowUpError("blow-up guard: H^1/2 norm " + std::to_string(nrm) + " exceeds " +
                            std::to_string(opt.blowup_factor) + " x initial at t=" + std::to_string(st.time()),
                        std::move(traj));
    }
    if (opt.observer || snap) {
      const auto v = st.state();
      if (opt.observer) opt.observer(st.time(), v);
      if (snap) record(st.time(), v);
    }
  }
  return traj;
}

// ---- ansatze ----

namespace detail {

// slow variable at time t: exact snapshot if present, linear interpolation otherwise
inline SpectralField slow_state_at(const Trajectory& tr, double t) {
  if (tr.times.empty()) throw std::invalid_argument("empty trajectory");
  const double tol = 1e-9 * std::max(1.0, std::abs(tr.times.back()));
  if (t < tr.times.front() - tol || t > tr.times.back() + tol) throw std::out_of_range("time outside trajectory range");
  auto it = std::lower_bound(tr.times.begin(), tr.times.end(), t - tol);
  const std::size_t i = std::size_t(it - tr.times.begin());
  if (i < tr.times.size() && std::abs(tr.times[i] - t) <= tol) return tr.states[i];
  const double t0 = tr.times[i - 1], t1 = tr.times[i];
  const double a = (t - t0) / (t1 - t0);
  return (1.0 - a) * tr.states[i - 1] + a * tr.states[i];
}

}  // namespace detail

// e^{-i|D|t} (eps W)
inline SpectralField first_order_ansatz_at(const SpectralField& w, double t, double eps) { return free_flow(eps * w, t); }

// e^{-i|D|t} (eps W + F_osc(eps W, t))
inline SpectralField second_order_ansatz_at(const SpectralField& w, double t, double eps) {
  const auto big = eps * w;
  return free_flow(big + F_osc_torus(big, t), t);
}

class Ansatz {
 public:
  Ansatz(Trajectory tr, bool second_order) : tr_(std::move(tr)), second_(second_order) {}
  SpectralField operator()(double t) const {
    const auto w = detail::slow_state_at(tr_, t);
    return second_ ? second_order_ansatz_at(w, t, tr_.flow_spec.eps) : first_order_ansatz_at(w, t, tr_.flow_spec.eps);
  }
  const Trajectory& trajectory() const { return tr_; }

 private:
  Trajectory tr_;
  bool second_;
};

inline Ansatz first_order_ansatz(Trajectory w_traj) {
  if (w_traj.flow_spec.flow != Flow::FirstOrderRG) throw std::invalid_argument("first-order ansatz needs a FirstOrderRG trajectory");
  return Ansatz(std::move(w_traj), false);
}

inline Ansatz second_order_ansatz(Trajectory w_traj) {
  if (w_traj.flow_spec.flow != Flow::SecondOrderAveraged || !w_traj.flow_spec.grid.torus())
    throw std::invalid_argument("second-order ansatz needs a SecondOrderAveraged torus trajectory");
  return Ansatz(std::move(w_traj), true);
}

// R_eps = eps^2 (f(W,t) - f(u_app,t)) + eps^4 D_W F_osc(W,t).f_res(W),  u_app = W + eps^2 F_osc(W,t)
inline SpectralField residual_first_order(const SpectralField& w, double t, double eps) {
  const double e2 = eps * eps;
  const auto u_app = w + e2 * F_osc(w, t);
  SpectralField r = e2 * (f_full(w, t) - f_full(u_app, t));
  r.axpy(e2 * e2, dF_osc(w, t, f_res(w)));
  return r;
}

// i dv/dt - |D|v - |v|^2 v for v = e^{-i|D|t} eps W with dW/dt = eps^2 f_res(W)
inline SpectralField ansatz_residual_first_order(const SpectralField& w, double t, double eps) {
  const auto v = first_order_ansatz_at(w, t, eps);
  return free_flow((I * eps * eps * eps) * f_res(w), t) - cubic(v);
}

}  // namespace szego
