#include "helmkrylov/bench/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hk {

using nlohmann::json;

namespace {

const char* record_name(RecordLevel r) {
  switch (r) {
    case RecordLevel::Residuals: return "residuals";
    case RecordLevel::Snapshots: return "snapshots";
    case RecordLevel::Full: return "full";
  }
  return "residuals";
}

ObstacleBc obstacle_bc_from_string(const std::string& s) {
  if (s == "neumann") return ObstacleBc::Neumann;
  if (s == "dirichlet") return ObstacleBc::Dirichlet;
  throw ConfigError("unknown obstacle condition '" + s + "'");
}

const char* side_name(DirichletSide s) { return s == DirichletSide::Opening ? "opening" : "back"; }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::vector<double> k_range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("sweep: need k_min <= k_max and step > 0");
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> ks;
  for (long i = 0; i <= n; ++i) ks.push_back(std::round((lo + static_cast<double>(i) * step) * 1e10) / 1e10);
  return ks;
}

}  // namespace

const char* to_string(ErrorReference r) {
  switch (r) {
    case ErrorReference::None: return "none";
    case ErrorReference::Series: return "series";
    case ErrorReference::Direct: return "direct";
  }
  return "none";
}

ErrorReference error_reference_from_string(const std::string& name) {
  if (name == "none") return ErrorReference::None;
  if (name == "series") return ErrorReference::Series;
  if (name == "direct") return ErrorReference::Direct;
  throw ConfigError("unknown error reference '" + name + "'");
}

void RunConfig::validate() const {
  if (!(solver.tol > 0.0 && solver.tol < 1.0)) throw ConfigError("solver.tol must lie in (0, 1)");
  if (solver.max_iter == 0) throw ConfigError("solver.max_iter must be positive");
  if (solver.restart && *solver.restart == 0) throw ConfigError("solver.restart must be positive");
  if (solver.snapshot_stride == 0) throw ConfigError("solver.snapshot_stride must be positive");
  if (fem.cells < 2) throw ConfigError("fem.cells must be at least 2");
  if (fem.degree < 1 || fem.degree > 3) throw ConfigError("fem.degree must be 1, 2 or 3");
  if (threads < 1) throw ConfigError("threads must be positive");
  if (k && !(*k > 0.0)) throw ConfigError("k must be positive");
  for (double kk : sweep.k) {
    if (!(kk > 0.0)) throw ConfigError("sweep wavenumbers must be positive");
  }
  for (const auto& md : accel.modes) {
    const bool ok = benchmark == Benchmark::Cavity ? (md.n >= 1 && md.m >= 1) : (md.n >= 0 && md.m >= 0);
    if (!ok) {
      throw ConfigError("invalid mode (" + std::to_string(md.n) + "," + std::to_string(md.m) + ") for " +
                        to_string(benchmark));
    }
  }
  if (accel.all_negative && benchmark != Benchmark::Cavity) {
    throw ConfigError("accel.modes = \"all-negative\" applies to the cavity only");
  }
  if (accel.csl.eps && *accel.csl.eps < 0.0) throw ConfigError("accel.csl.eps must be non-negative");
  for (AccelMethod m : accel.methods) {
    const bool needs_modes = m == AccelMethod::Deflation || m == AccelMethod::CslDeflation ||
                             m == AccelMethod::Additive;
    if (needs_modes && accel.modes.empty() && !accel.all_negative) {
      throw ConfigError(std::string("method '") + to_string(m) + "' needs accel.modes");
    }
  }
  if (diagnostics.hr_stride == 0) throw ConfigError("diagnostics.hr_stride must be positive");
  for (const auto& s : diagnostics.schedule) {
    if (s.l == 0 || s.m == 0) throw ConfigError("diagnostics.schedule: l and m must be positive");
  }
  if (benchmark == Benchmark::Scatter) {
    const double h = fem.h();
    auto aligned = [h](double v) { return std::abs(v / h - std::round(v / h)) < 1e-9; };
    if (!aligned(geometry.L) || !aligned(geometry.L_pml) || !aligned(geometry.L_O) || !aligned(geometry.l_O / 2) ||
        !aligned(geometry.wall_t) || !aligned(geometry.opening_x())) {
      throw ConfigError("scatter geometry is not aligned to the h-grid");
    }
  }
}

double RunConfig::points_per_wavelength() const {
  double kmax = k.value_or(0.0);
  for (double kk : sweep.k) kmax = std::max(kmax, kk);
  if (kmax <= 0.0) return std::numeric_limits<double>::infinity();
  return fem.degree * fem.cells * 2.0 * std::numbers::pi / kmax;
}

RunConfig default_cavity_config() {
  RunConfig c;
  c.benchmark = Benchmark::Cavity;
  c.fem = {32, 2};
  c.k = 3.01 * std::numbers::sqrt2 * std::numbers::pi;
  c.sweep.k = k_range(12.5, 14.0, 0.01);
  c.reference = ErrorReference::Series;
  return c;
}

RunConfig default_scatter_config() {
  RunConfig c;
  c.benchmark = Benchmark::Scatter;
  c.fem = {20, 3};
  c.pattern = DiagonalPattern::Uniform;
  c.k = 23.591;
  c.sweep.k = k_range(23.5, 24.5, 0.01);
  c.reference = ErrorReference::None;
  c.accel.modes = {{3, 0}};
  c.diagnostics.tracked = 6;
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config", {"benchmark", "geometry", "fem", "solver", "accel", "sweep", "k", "reference",
                           "diagnostics", "output", "seed", "threads"});
  std::string bench = "cavity";
  read(j, "benchmark", bench);
  RunConfig c = benchmark_from_string(bench) == Benchmark::Cavity ? default_cavity_config()
                                                                   : default_scatter_config();
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    check_keys(g, "geometry", {"pattern", "L", "L_pml", "L_O", "l_O", "wall_t", "x_open", "obstacle_bc", "theta"});
    std::string pattern = to_string(c.pattern);
    read(g, "pattern", pattern);
    c.pattern = diagonal_pattern_from_string(pattern);
    c.geometry.pattern = c.pattern;
    read(g, "L", c.geometry.L);
    read(g, "L_pml", c.geometry.L_pml);
    read(g, "L_O", c.geometry.L_O);
    read(g, "l_O", c.geometry.l_O);
    read(g, "wall_t", c.geometry.wall_t);
    if (g.contains("x_open") && !g["x_open"].is_null()) c.geometry.x_open = g["x_open"].get<double>();
    std::string bc = to_string(c.geometry.bc);
    read(g, "obstacle_bc", bc);
    c.geometry.bc = obstacle_bc_from_string(bc);
    read(g, "theta", c.theta);
  }
  if (j.contains("fem")) {
    const auto& f = j["fem"];
    check_keys(f, "fem", {"cells", "h", "degree"});
    read(f, "cells", c.fem.cells);
    if (f.contains("h")) {
      const double h = f["h"].get<double>();
      if (!(h > 0.0) || std::abs(1.0 / h - std::round(1.0 / h)) > 1e-9) throw ConfigError("fem.h: 1/h must be integral");
      c.fem.cells = static_cast<int>(std::lround(1.0 / h));
    }
    read(f, "degree", c.fem.degree);
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, "solver", {"tol", "max_iter", "restart", "record", "snapshot_stride"});
    read(s, "tol", c.solver.tol);
    read(s, "max_iter", c.solver.max_iter);
    if (s.contains("restart") && !s["restart"].is_null()) c.solver.restart = s["restart"].get<Index>();
    std::string rec = record_name(c.solver.record);
    read(s, "record", rec);
    c.solver.record = record_level_from_string(rec);
    read(s, "snapshot_stride", c.solver.snapshot_stride);
  }
  if (j.contains("accel")) {
    const auto& a = j["accel"];
    check_keys(a, "accel", {"methods", "modes", "dirichlet_side", "csl"});
    if (a.contains("methods")) {
      c.accel.methods.clear();
      for (const auto& m : a["methods"]) c.accel.methods.push_back(accel_method_from_string(m.get<std::string>()));
    }
    if (a.contains("modes")) {
      c.accel.modes.clear();
      c.accel.all_negative = false;
      if (a["modes"].is_string()) {
        if (a["modes"].get<std::string>() != "all-negative") throw ConfigError("accel.modes: expected a list or \"all-negative\"");
        c.accel.all_negative = true;
      } else {
        for (const auto& m : a["modes"]) {
          if (!m.is_array() || m.size() != 2) throw ConfigError("accel.modes: each mode is [n, m]");
          c.accel.modes.push_back({m[0].get<int>(), m[1].get<int>()});
        }
      }
    }
    std::string side = side_name(c.accel.dirichlet_side);
    read(a, "dirichlet_side", side);
    c.accel.dirichlet_side = dirichlet_side_from_string(side);
    if (a.contains("csl")) {
      const auto& s = a["csl"];
      check_keys(s, "accel.csl", {"kind", "eps", "drop_tol", "fill", "pivot_shift"});
      std::string kind = to_string(c.accel.csl.kind);
      read(s, "kind", kind);
      c.accel.csl.kind = factor_kind_from_string(kind);
      c.accel.csl.ilu.kind = c.accel.csl.kind;
      if (s.contains("eps") && !s["eps"].is_null()) c.accel.csl.eps = s["eps"].get<double>();
      read(s, "drop_tol", c.accel.csl.ilu.drop_tol);
      read(s, "fill", c.accel.csl.ilu.fill);
      if (s.contains("pivot_shift") && !s["pivot_shift"].is_null()) c.accel.csl.ilu.pivot_shift = s["pivot_shift"].get<double>();
    }
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    check_keys(s, "sweep", {"k", "k_min", "k_max", "step"});
    if (s.contains("k")) {
      c.sweep.k = s["k"].get<std::vector<double>>();
    } else if (s.contains("k_min") || s.contains("k_max") || s.contains("step")) {
      if (!s.contains("k_min") || !s.contains("k_max") || !s.contains("step")) {
        throw ConfigError("sweep: give k, or all of k_min, k_max and step");
      }
      c.sweep.k = k_range(s["k_min"].get<double>(), s["k_max"].get<double>(), s["step"].get<double>());
    }
  }
  if (j.contains("k") && !j["k"].is_null()) c.k = j["k"].get<double>();
  std::string ref = to_string(c.reference);
  read(j, "reference", ref);
  c.reference = error_reference_from_string(ref);
  if (c.reference == ErrorReference::Series && c.benchmark != Benchmark::Cavity) {
    throw ConfigError("reference = \"series\" exists for the cavity only");
  }
  if (j.contains("diagnostics")) {
    const auto& d = j["diagnostics"];
    check_keys(d, "diagnostics", {"hr_stride", "tracked", "schedule", "thm2", "contour_samples"});
    read(d, "hr_stride", c.diagnostics.hr_stride);
    read(d, "tracked", c.diagnostics.tracked);
    read(d, "thm2", c.diagnostics.thm2);
    read(d, "contour_samples", c.diagnostics.contour_samples);
    if (d.contains("schedule")) {
      for (const auto& e : d["schedule"]) {
        check_keys(e, "diagnostics.schedule", {"l", "m", "J"});
        BoundSchedule s;
        read(e, "l", s.l);
        read(e, "m", s.m);
        read(e, "J", s.j);
        c.diagnostics.schedule.push_back(s);
      }
    }
  }
  read(j, "output", c.output);
  read(j, "seed", c.seed);
  read(j, "threads", c.threads);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json j;
  j["benchmark"] = to_string(c.benchmark);
  json g;
  g["pattern"] = to_string(c.pattern);
  g["L"] = c.geometry.L;
  g["L_pml"] = c.geometry.L_pml;
  g["L_O"] = c.geometry.L_O;
  g["l_O"] = c.geometry.l_O;
  g["wall_t"] = c.geometry.wall_t;
  g["x_open"] = c.geometry.x_open ? json(*c.geometry.x_open) : json(nullptr);
  g["obstacle_bc"] = to_string(c.geometry.bc);
  g["theta"] = c.theta;
  j["geometry"] = g;
  j["fem"] = {{"cells", c.fem.cells}, {"degree", c.fem.degree}};
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"restart", c.solver.restart ? json(*c.solver.restart) : json(nullptr)},
                 {"record", record_name(c.solver.record)},
                 {"snapshot_stride", c.solver.snapshot_stride}};
  json methods = json::array();
  for (AccelMethod m : c.accel.methods) methods.push_back(to_string(m));
  json modes = json::array();
  for (const auto& m : c.accel.modes) modes.push_back({m.n, m.m});
  json csl = {{"kind", to_string(c.accel.csl.kind)},
              {"eps", c.accel.csl.eps ? json(*c.accel.csl.eps) : json(nullptr)},
              {"drop_tol", c.accel.csl.ilu.drop_tol},
              {"fill", c.accel.csl.ilu.fill}};
  j["accel"] = {{"methods", methods},
                {"modes", c.accel.all_negative ? json("all-negative") : modes},
                {"dirichlet_side", side_name(c.accel.dirichlet_side)},
                {"csl", csl}};
  j["sweep"] = {{"k", c.sweep.k}};
  j["k"] = c.k ? json(*c.k) : json(nullptr);
  j["reference"] = to_string(c.reference);
  json sched = json::array();
  for (const auto& s : c.diagnostics.schedule) sched.push_back({{"l", s.l}, {"m", s.m}, {"J", s.j}});
  j["diagnostics"] = {{"hr_stride", c.diagnostics.hr_stride},
                      {"tracked", c.diagnostics.tracked},
                      {"schedule", sched},
                      {"thm2", c.diagnostics.thm2},
                      {"contour_samples", c.diagnostics.contour_samples}};
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j.dump(2);
}

}  // namespace hk
