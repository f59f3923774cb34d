#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "experiments.hpp"

namespace szego {

// ---- enum names ----

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Scaling1T: return "scaling1t";
    case ExperimentKind::Scaling1R: return "scaling1r";
    case ExperimentKind::Scaling2T: return "scaling2t";
    case ExperimentKind::YvsU: return "y_vs_u";
    case ExperimentKind::Conservation: return "conservation";
    case ExperimentKind::FoscGrowth: return "fosc_growth";
    case ExperimentKind::SobolevGrowth: return "sobolev_growth";
    case ExperimentKind::KernelAudit: return "kernel_audit";
  }
  return "?";
}

inline const char* to_string(HorizonMode m) { return m == HorizonMode::FixedSlowTime ? "fixed_slow_time" : "log_corrected"; }

inline const char* to_string(DataKind k) {
  switch (k) {
    case DataKind::HardyPolynomial: return "hardy_polynomial";
    case DataKind::RationalNonGeneric: return "rational_non_generic";
    case DataKind::SeededRandomHardy: return "seeded_random_hardy";
    case DataKind::PoissonBump: return "poisson_bump";
  }
  return "?";
}

namespace cfg {

template <class E, std::size_t N>
E parse_enum(const std::string& v, const E (&all)[N], const std::string& key) {
  for (E e : all)
    if (v == to_string(e)) return e;
  std::string names;
  for (E e : all) names += std::string(names.empty() ? "" : ", ") + to_string(e);
  throw ConfigError("config: bad value '" + v + "' for key '" + key + "' (expected one of: " + names + ")");
}

inline constexpr ExperimentKind kKinds[] = {ExperimentKind::Scaling1T,    ExperimentKind::Scaling1R,  ExperimentKind::Scaling2T,
                                           ExperimentKind::YvsU,         ExperimentKind::Conservation, ExperimentKind::FoscGrowth,
                                           ExperimentKind::SobolevGrowth, ExperimentKind::KernelAudit};
inline constexpr HorizonMode kHorizons[] = {HorizonMode::FixedSlowTime, HorizonMode::LogCorrected};
inline constexpr Domain kDomains[] = {Domain::Torus, Domain::BigBox};
inline constexpr DataKind kData[] = {DataKind::HardyPolynomial, DataKind::RationalNonGeneric, DataKind::SeededRandomHardy,
                                     DataKind::PoissonBump};
inline constexpr Flow kFlows[] = {Flow::FullNLW, Flow::FirstOrderRG, Flow::SecondOrderAveraged};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// plain number, or a multiple of pi: "64pi", "64*pi", "pi"
inline double parse_double(const std::string& raw, const std::string& key) {
  std::string v = trim(raw);
  double mult = 1.0;
  if (v.size() >= 2 && v.compare(v.size() - 2, 2, "pi") == 0) {
    mult = std::numbers::pi;
    v = trim(v.substr(0, v.size() - 2));
    if (!v.empty() && v.back() == '*') v = trim(v.substr(0, v.size() - 1));
    if (v.empty()) return mult;
  }
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("config: bad number '" + raw + "' for key '" + key + "'");
  return x * mult;
}

inline long long parse_int(const std::string& raw, const std::string& key) {
  const std::string v = trim(raw);
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("config: bad integer '" + raw + "' for key '" + key + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& raw, const std::string& key) {
  const std::string v = trim(raw);
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE)
    throw ConfigError("config: bad unsigned integer '" + raw + "' for key '" + key + "'");
  return x;
}

inline bool parse_bool(const std::string& raw, const std::string& key) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean '" + raw + "' for key '" + key + "'");
}

inline std::vector<double> parse_list(const std::string& raw, const std::string& key) {
  std::vector<double> out;
  if (trim(raw).empty()) return out;
  for (auto& item : split(raw, ',')) out.push_back(parse_double(item, key));
  return out;
}

inline std::string emit_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

// "k:re" or "k:re:im", comma separated
inline std::vector<std::pair<int, cplx>> parse_modes(const std::string& raw, const std::string& key) {
  std::vector<std::pair<int, cplx>> out;
  if (trim(raw).empty()) return out;
  for (auto& item : split(raw, ',')) {
    auto parts = split(item, ':');
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("config: bad mode '" + item + "' for key '" + key + "' (use k:re[:im])");
    const int k = int(parse_int(parts[0], key));
    const double re = parse_double(parts[1], key);
    const double im = parts.size() == 3 ? parse_double(parts[2], key) : 0.0;
    out.emplace_back(k, cplx(re, im));
  }
  return out;
}

inline std::string emit_modes(const std::vector<std::pair<int, cplx>>& modes) {
  std::string s;
  for (std::size_t i = 0; i < modes.size(); ++i)
    s += (i ? ", " : "") + std::to_string(modes[i].first) + ":" + fmt(modes[i].second.real()) + ":" + fmt(modes[i].second.imag());
  return s;
}

}  // namespace cfg

struct RunConfig {
  ExperimentPlan plan;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  bool emit_svg = false;
  bool operator==(const RunConfig&) const = default;
};

inline void set_seed(RunConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.plan.seed = seed;
  c.plan.initial_data.seed = seed;
}

inline RunConfig default_config(ExperimentKind kind) {
  RunConfig c;
  c.plan = default_plan(kind);
  set_seed(c, c.seed);
  return c;
}

namespace cfg {

struct Field {
  std::string section, key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

#define SZEGO_DBL(sec, name, member)                                                          \
  Field{sec, name, [](const RunConfig& c) { return fmt(c.member); },                          \
        [](RunConfig& c, const std::string& v, const std::string& k) { c.member = parse_double(v, k); }}
#define SZEGO_INT(sec, name, member)                                                          \
  Field{sec, name, [](const RunConfig& c) { return std::to_string(c.member); },               \
        [](RunConfig& c, const std::string& v, const std::string& k) { c.member = int(parse_int(v, k)); }}
#define SZEGO_BOOL(sec, name, member)                                                         \
  Field{sec, name, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& v, const std::string& k) { c.member = parse_bool(v, k); }}

inline const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      Field{"run", "seed", [](const RunConfig& c) { return std::to_string(c.seed); },
            [](RunConfig& c, const std::string& v, const std::string& k) { set_seed(c, parse_u64(v, k)); }},
      Field{"run", "output_dir", [](const RunConfig& c) { return c.output_dir; },
            [](RunConfig& c, const std::string& v, const std::string&) { c.output_dir = v; }},
      SZEGO_BOOL("run", "emit_svg", emit_svg),

      Field{"experiment", "kind", [](const RunConfig& c) { return std::string(to_string(c.plan.experiment)); },
            [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.experiment = parse_enum(v, kKinds, k); }},
      Field{"experiment", "eps_list", [](const RunConfig& c) { return emit_list(c.plan.eps_list); },
            [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.eps_list = parse_list(v, k); }},
      SZEGO_DBL("experiment", "s", plan.s),
      SZEGO_DBL("experiment", "alpha", plan.alpha),
      SZEGO_DBL("experiment", "delta", plan.delta),
      Field{"experiment", "horizon_mode", [](const RunConfig& c) { return std::string(to_string(c.plan.horizon_mode)); },
            [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.horizon_mode = parse_enum(v, kHorizons, k); }},
      SZEGO_DBL("experiment", "slow_time", plan.slow_time),
      SZEGO_DBL("experiment", "slow_time_cap", plan.slow_time_cap),
      SZEGO_DBL("experiment", "dt_max", plan.dt_max),
      SZEGO_DBL("experiment", "slow_resolution", plan.slow_resolution),
      SZEGO_DBL("experiment", "slope_threshold", plan.slope_threshold),
      SZEGO_DBL("experiment", "residual_threshold", plan.residual_threshold),
      SZEGO_DBL("experiment", "contrast_threshold", plan.contrast_threshold),
      SZEGO_DBL("experiment", "norm_growth_limit", plan.norm_growth_limit),
      Field{"experiment", "flow", [](const RunConfig& c) { return std::string(to_string(c.plan.flow)); },
            [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.flow = parse_enum(v, kFlows, k); }},
      SZEGO_DBL("experiment", "t_end", plan.t_end),
      SZEGO_DBL("experiment", "dt", plan.dt),
      SZEGO_DBL("experiment", "snapshot_every", plan.snapshot_every),
      SZEGO_DBL("experiment", "t_min", plan.t_min),
      SZEGO_DBL("experiment", "t_max", plan.t_max),
      SZEGO_INT("experiment", "samples", plan.samples),
      SZEGO_DBL("experiment", "fit_t_min", plan.fit_t_min),
      SZEGO_DBL("experiment", "exponent_lo", plan.exponent_lo),
      SZEGO_DBL("experiment", "exponent_hi", plan.exponent_hi),
      SZEGO_DBL("experiment", "torus_exponent_max", plan.torus_exponent_max),
      SZEGO_DBL("experiment", "sample_every", plan.sample_every),
      SZEGO_DBL("experiment", "window_fraction", plan.window_fraction),
      SZEGO_DBL("experiment", "boundary_band", plan.boundary_band),
      SZEGO_DBL("experiment", "boundary_tolerance", plan.boundary_tolerance),
      SZEGO_BOOL("experiment", "stop_at_boundary", plan.stop_at_boundary),
      SZEGO_INT("experiment", "audit_fields", plan.audit_fields),
      SZEGO_DBL("experiment", "tolerance", plan.tolerance),
      SZEGO_BOOL("experiment", "negative_control", plan.negative_control),

      Field{"grid", "domain", [](const RunConfig& c) { return std::string(to_string(c.plan.domain)); },
            [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.domain = parse_enum(v, kDomains, k); }},
      SZEGO_INT("grid", "n_max", plan.n_max),
      SZEGO_DBL("grid", "length", plan.length),

      Field{"initial_data", "kind", [](const RunConfig& c) { return std::string(to_string(c.plan.initial_data.kind)); },
            [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.initial_data.kind = parse_enum(v, kData, k); }},
      Field{"initial_data", "modes", [](const RunConfig& c) { return emit_modes(c.plan.initial_data.modes); },
            [](RunConfig& c, const std::string& v, const std::string& k) { c.plan.initial_data.modes = parse_modes(v, k); }},
      SZEGO_DBL("initial_data", "decay", plan.initial_data.decay),
      SZEGO_DBL("initial_data", "ratio", plan.initial_data.ratio),
      SZEGO_DBL("initial_data", "normalization", plan.initial_data.normalization),
  };
  return all;
}

#undef SZEGO_DBL
#undef SZEGO_INT
#undef SZEGO_BOOL

}  // namespace cfg

inline std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  std::string section;
  for (auto& f : cfg::fields()) {
    if (f.section != section) {
      if (!section.empty()) os << "\n";
      section = f.section;
      os << "[" << section << "]\n";
    }
    os << f.key << " = " << f.get(c) << "\n";
  }
  return os.str();
}

// Keys before the first section header belong to [run].  experiment.kind picks the
// defaults; switching grid.domain without giving length/n_max picks that geometry's defaults.
inline RunConfig parse_config(const std::string& text, ExperimentKind default_kind) {
  struct Entry {
    std::string section, key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::string section = "run";
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = cfg::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: malformed section header on line " + std::to_string(no));
      section = cfg::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key = value on line " + std::to_string(no));
    entries.push_back({section, cfg::trim(line.substr(0, eq)), cfg::trim(line.substr(eq + 1)), no});
  }

  std::map<std::string, const cfg::Field*> index;
  for (auto& f : cfg::fields()) index[f.section + "." + f.key] = &f;
  std::map<std::string, const Entry*> seen;
  for (auto& e : entries) {
    const std::string full = e.section + "." + e.key;
    if (!index.count(full)) throw ConfigError("config: unknown key '" + full + "' on line " + std::to_string(e.line));
    if (seen.count(full)) throw ConfigError("config: duplicate key '" + full + "' on line " + std::to_string(e.line));
    seen[full] = &e;
  }

  ExperimentKind kind = default_kind;
  if (auto it = seen.find("experiment.kind"); it != seen.end()) kind = cfg::parse_enum(it->second->value, cfg::kKinds, it->first);
  RunConfig c = default_config(kind);
  const Domain base_domain = c.plan.domain;
  for (auto& e : entries) {
    const std::string full = e.section + "." + e.key;
    index[full]->set(c, e.value, full);
  }
  if (c.plan.domain != base_domain) {
    const bool torus = c.plan.domain == Domain::Torus;
    if (!seen.count("grid.length")) c.plan.length = torus ? 2 * std::numbers::pi : 64 * std::numbers::pi;
    if (!seen.count("grid.n_max")) c.plan.n_max = torus ? 32 : 640;
  }
  // seed applies to every seeded consumer even if it was not given explicitly
  set_seed(c, c.seed);
  return c;
}

inline RunConfig load_config(const std::string& path, ExperimentKind default_kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), default_kind);
}

}  // namespace szego
