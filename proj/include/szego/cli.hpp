#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "dynamics.hpp"
#include "experiments.hpp"
#include "report.hpp"

namespace szego {

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2, kExitAudit = 3 };

namespace fs = std::filesystem;

namespace cli {

inline std::string b(bool v) { return v ? "true" : "false"; }
inline std::string b01(bool v) { return v ? "1" : "0"; }

inline void require_kind(const RunConfig& c, std::initializer_list<ExperimentKind> ok, const char* cmd) {
  for (auto k : ok)
    if (c.plan.experiment == k) return;
  throw ConfigError(std::string("config: experiment.kind = ") + to_string(c.plan.experiment) + " cannot be run by '" + cmd + "'");
}

inline void write_trajectory(const fs::path& dir, const Trajectory& tr, double s) {
  CsvWriter csv(dir / "trajectory.csv", {"t", "H_half", "H_s", "E", "Q", "M"});
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& v = tr.states[i];
    csv.row({fmt17(tr.times[i]), fmt17(sobolev_norm(v, 0.5)), fmt17(sobolev_norm(v, s)), fmt17(energy(v)), fmt17(mass(v)),
             fmt17(momentum(v))});
  }
}

inline void write_conserved(const fs::path& dir, const Trajectory& tr) {
  ConservedReport r;
  for (std::size_t i = 0; i < tr.times.size(); ++i) append_sample(r, tr.times[i], tr.states[i]);
  finalize_drifts(r);
  CsvWriter csv(dir / "conserved.csv", {"quantity", "initial", "final", "max_rel_drift"});
  auto put = [&](const char* name, const std::vector<double>& q, double d) {
    if (q.empty()) return;
    csv.row({name, fmt17(q.front()), fmt17(q.back()), fmt17(d)});
  };
  put("E", r.energy, r.drift_energy);
  put("Q", r.mass, r.drift_mass);
  put("M", r.momentum, r.drift_momentum);
  put("H_half", r.h_half, r.drift_h_half);
}

inline std::string scaling_summary(const ScalingReport& r) {
  return "slope=" + fmt17(r.fitted_slope) + " residual=" + fmt17(r.fit_residual) + " passed=" + b(r.passed);
}

inline void write_scaling(const fs::path& dir, const std::string& stem, const ScalingReport& r, bool svg) {
  CsvWriter csv(dir / (stem + ".csv"), {"eps", "horizon", "sup_error", "sup_W_norm", "flagged"});
  for (auto& row : r.rows) csv.row({fmt17(row.eps), fmt17(row.horizon), fmt17(row.sup_error), fmt17(row.sup_w_norm), b01(row.flagged)});
  if (svg) {
    LogLogPlot p;
    p.title = r.label + " slope " + fmt17(std::round(r.fitted_slope * 1000) / 1000);
    p.xlabel = "eps";
    p.ylabel = "sup error";
    for (auto& row : r.rows) p.x.push_back(row.eps), p.y.push_back(row.sup_error);
    p.has_fit = r.fit_ok;
    // recover the intercept from the fitted rows
    if (r.fit_ok) {
      double sx = 0, sy = 0;
      int n = 0;
      for (auto& row : r.rows)
        if (!row.failed && row.eps > 0 && std::isfinite(row.sup_error)) {
          sx += std::log(row.eps), sy += std::log(std::max(row.sup_error, kErrorFloor));
          ++n;
        }
      p.slope = r.fitted_slope;
      p.intercept = n ? (sy - r.fitted_slope * sx) / n : 0;
    }
    write_text(dir / (stem + ".svg"), render_svg(p));
  }
}

}  // namespace cli

inline int cmd_simulate(const RunConfig& c, std::ostream& out, std::vector<std::string>& notes) {
  cli::require_kind(c, {ExperimentKind::Conservation}, "simulate");
  const auto& p = c.plan;
  validate(p);
  const auto g = p.grid();
  FlowSpec spec;
  spec.flow = p.flow;
  spec.eps = p.eps_list.empty() ? 0.1 : p.eps_list.front();
  spec.dt = p.dt;
  spec.t_end = p.t_end;
  spec.s = std::max(p.s, 0.5);
  spec.grid = g;
  validate(spec);
  const auto w0 = make_initial_data(p.initial_data, g);
  const auto v0 = p.flow == Flow::FullNLW ? spec.eps * w0 : w0;
  IntegrateOptions opt;
  opt.snapshot_every = p.snapshot_every;
  const fs::path dir = c.output_dir;
  try {
    const auto tr = integrate(spec, v0, opt);
    cli::write_trajectory(dir, tr, p.s);
    cli::write_conserved(dir, tr);
    ConservedReport r;
    for (std::size_t i = 0; i < tr.times.size(); ++i) append_sample(r, tr.times[i], tr.states[i]);
    finalize_drifts(r);
    out << "flow=" << to_string(p.flow) << " t_end=" << fmt17(p.t_end) << " drift_E=" << fmt17(r.drift_energy)
        << " drift_Q=" << fmt17(r.drift_mass) << " drift_M=" << fmt17(r.drift_momentum) << "\n";
    return kExitOk;
  } catch (const BlowUpError& e) {
    cli::write_trajectory(dir, e.partial, p.s);
    notes.push_back(e.what());
    out << e.what() << "\n";
    return kExitNumeric;
  }
}

inline int cmd_scaling(const RunConfig& c, std::ostream& out, std::vector<std::string>& notes) {
  cli::require_kind(c, {ExperimentKind::Scaling1T, ExperimentKind::Scaling1R, ExperimentKind::Scaling2T, ExperimentKind::YvsU}, "scaling");
  const fs::path dir = c.output_dir;
  std::vector<std::string> summary;
  auto emit_notes = [&](const ScalingReport& r) {
    for (auto& n : r.notes) notes.push_back(r.label + ": " + n), summary.push_back("# " + n);
    for (auto& row : r.rows)
      if (!row.note.empty()) notes.push_back(r.label + " eps=" + fmt17(row.eps) + ": " + row.note);
  };
  if (c.plan.experiment == ExperimentKind::Scaling2T) {
    const auto r = run_scaling_second_order(c.plan);
    cli::write_scaling(dir, "scaling", r.second, c.emit_svg);
    cli::write_scaling(dir, "scaling_first_order", r.first, c.emit_svg);
    emit_notes(r.second);
    summary.push_back(cli::scaling_summary(r.second));
    summary.push_back("first_order_slope=" + fmt17(r.first.fitted_slope) + " contrast=" + fmt17(r.second.fitted_slope - r.first.fitted_slope) +
                      " monotone=" + cli::b(r.monotone));
  } else {
    ScalingReport r;
    switch (c.plan.experiment) {
      case ExperimentKind::Scaling1T: r = run_scaling_first_order_torus(c.plan); break;
      case ExperimentKind::Scaling1R: r = run_scaling_first_order_box(c.plan); break;
      default: r = run_y_vs_u(c.plan); break;
    }
    cli::write_scaling(dir, "scaling", r, c.emit_svg);
    emit_notes(r);
    summary.push_back(cli::scaling_summary(r));
  }
  std::string text;
  for (auto& l : summary) text += l + "\n";
  write_text(dir / "summary.txt", text);
  out << text;
  return kExitOk;
}

inline int cmd_audit(const RunConfig& c, std::ostream& out, std::ostream& err, std::vector<std::string>&) {
  cli::require_kind(c, {ExperimentKind::KernelAudit}, "audit");
  if (c.plan.n_max > 8) err << "warning: kernel audit at n_max=" << c.plan.n_max << " is slow\n";
  const auto r = run_kernel_audit(c.plan);
  CsvWriter csv(fs::path(c.output_dir) / "audit.csv", {"check", "max_error", "passed"});
  for (auto& row : r.rows) {
    csv.row({row.check, fmt17(row.max_error), cli::b01(row.passed)});
    out << (row.passed ? "PASS " : "FAIL ") << row.check << " max_error=" << fmt17(row.max_error) << "\n";
  }
  return r.all_passed ? kExitOk : kExitAudit;
}

inline int cmd_growth(const RunConfig& c, std::ostream& out, std::vector<std::string>& notes) {
  cli::require_kind(c, {ExperimentKind::FoscGrowth, ExperimentKind::SobolevGrowth}, "growth");
  const auto r = c.plan.experiment == ExperimentKind::FoscGrowth ? run_fosc_growth(c.plan) : run_sobolev_growth(c.plan);
  const fs::path dir = c.output_dir;
  CsvWriter csv(dir / "growth.csv", {"t", "norm", "window_flag"});
  for (auto& row : r.rows) csv.row({fmt17(row.t), fmt17(row.norm), cli::b01(row.in_window)});
  std::string text;
  for (auto& n : r.notes) text += "# " + n + "\n", notes.push_back(n);
  for (auto& w : r.warnings) text += "# " + w + "\n", notes.push_back(w);
  text += std::string(r.qualitative ? "QUALITATIVE " : "") + "exponent=" + fmt17(r.exponent) + " residual=" + fmt17(r.fit_residual) +
          " window=[" + fmt17(r.window_lo) + "," + fmt17(r.window_hi) + "] passed=" + cli::b(r.passed) + "\n";
  write_text(dir / "summary.txt", text);
  out << text;
  if (c.emit_svg) {
    LogLogPlot p;
    p.title = r.label;
    p.xlabel = "t";
    p.ylabel = "norm";
    for (auto& row : r.rows) p.x.push_back(row.t), p.y.push_back(row.norm);
    write_text(dir / "growth.svg", render_svg(p));
  }
  return kExitOk;
}

inline ExperimentKind default_kind_for(const std::string& command) {
  if (command == "simulate") return ExperimentKind::Conservation;
  if (command == "scaling") return ExperimentKind::Scaling1T;
  if (command == "audit") return ExperimentKind::KernelAudit;
  if (command == "growth") return ExperimentKind::FoscGrowth;
  throw ConfigError("unknown command '" + command + "'");
}

// Runs one subcommand, maps exceptions onto exit codes and writes the run metadata.
inline int run_command(const std::string& command, const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::system_clock::now();
  std::vector<std::string> notes;
  int code = kExitOk;
  bool have_dir = false;
  try {
    std::filesystem::create_directories(c.output_dir);
    have_dir = true;
    if (command == "simulate") code = cmd_simulate(c, out, notes);
    else if (command == "scaling") code = cmd_scaling(c, out, notes);
    else if (command == "audit") code = cmd_audit(c, out, err, notes);
    else if (command == "growth") code = cmd_growth(c, out, notes);
    else throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    code = kExitConfig;
  } catch (const NumericGuard& e) {
    err << "numeric guard: " << e.what() << "\n";
    code = kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    code = kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kExitConfig;
  }
  if (have_dir) {
    try {
      write_run_metadata(c.output_dir, command, c, start, std::chrono::system_clock::now(), code, notes);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
    }
  }
  return code;
}

}  // namespace szego
