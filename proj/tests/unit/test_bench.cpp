#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "helmkrylov/bench/quasimodes.hpp"
#include "helmkrylov/bench/runner.hpp"

using namespace hk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hk_bench_" + name);
  std::filesystem::remove_all(p);
  return p;
}

double last_relres(const std::filesystem::path& trace) {
  std::ifstream is(trace);
  std::string line, last;
  std::getline(is, line);
  REQUIRE(line == "iter,relres,restart");
  while (std::getline(is, line)) {
    if (!line.empty()) last = line;
  }
  const auto a = last.find(',');
  const auto b = last.find(',', a + 1);
  return std::stod(last.substr(a + 1, b - a - 1));
}

RunConfig small_cavity() {
  RunConfig c = default_cavity_config();
  c.fem = {8, 2};
  c.k = 7.0;
  c.sweep.k = {6.0, 7.0, 8.0};
  c.accel.methods = {AccelMethod::None, AccelMethod::Csl};
  return c;
}

}  // namespace

TEST_CASE("default configurations", "[config]") {
  const RunConfig cav = default_cavity_config();
  REQUIRE_NOTHROW(cav.validate());
  CHECK(cav.fem.cells == 32);
  CHECK(cav.fem.degree == 2);
  CHECK(cav.solver.tol == 1e-6);
  CHECK_THAT(*cav.k, WithinRel(3.01 * std::sqrt(2.0) * std::numbers::pi, 1e-14));
  REQUIRE(cav.sweep.k.size() == 151);
  CHECK(cav.sweep.k.front() == 12.5);
  CHECK_THAT(cav.sweep.k.back(), WithinAbs(14.0, 1e-12));
  CHECK_THAT(cav.sweep.k[45], WithinAbs(12.95, 1e-12));
  CHECK_THAT(cav.points_per_wavelength(), WithinAbs(2.0 * 32 * 2.0 * std::numbers::pi / 14.0, 1e-12));

  const RunConfig sca = default_scatter_config();
  REQUIRE_NOTHROW(sca.validate());
  CHECK(sca.fem.degree == 3);
  CHECK(*sca.k == 23.591);
  CHECK(sca.geometry.L_O == 1.3);
  CHECK(sca.geometry.l_O == 0.4);
  CHECK_THAT(sca.theta, WithinRel(0.4 * std::numbers::pi, 1e-14));
}

TEST_CASE("config parsing", "[config]") {
  const RunConfig c = parse_config(R"({
    "benchmark": "cavity",
    "fem": {"cells": 16, "degree": 1},
    "solver": {"tol": 1e-8, "max_iter": 500, "restart": 25},
    "accel": {"methods": ["none", "csl+deflation"], "modes": [[3, 3], [1, 4]], "csl": {"kind": "ilu0", "eps": 2.5}},
    "sweep": {"k_min": 1.0, "k_max": 2.0, "step": 0.25},
    "reference": "direct",
    "diagnostics": {"schedule": [{"l": 5, "m": 3, "J": [0, 1]}]},
    "threads": 2
  })");
  CHECK(c.fem.cells == 16);
  CHECK(c.fem.degree == 1);
  CHECK(c.solver.tol == 1e-8);
  CHECK(c.solver.max_iter == 500);
  REQUIRE(c.solver.restart);
  CHECK(*c.solver.restart == 25);
  REQUIRE(c.accel.methods.size() == 2);
  CHECK(c.accel.methods[1] == AccelMethod::CslDeflation);
  REQUIRE(c.accel.modes.size() == 2);
  CHECK(c.accel.modes[1] == ModeIndex{1, 4});
  REQUIRE(c.accel.csl.eps);
  CHECK(*c.accel.csl.eps == 2.5);
  REQUIRE(c.sweep.k.size() == 5);
  CHECK(c.sweep.k[3] == 1.75);
  CHECK(c.reference == ErrorReference::Direct);
  REQUIRE(c.diagnostics.schedule.size() == 1);
  CHECK(c.diagnostics.schedule[0].j == std::vector<Index>{0, 1});
  CHECK(c.threads == 2);

  SECTION("serialization roundtrip") {
    const std::string text = to_json(c);
    CHECK(to_json(parse_config(text)) == text);
  }
  SECTION("all-negative modes") {
    const RunConfig d = parse_config(R"({"accel": {"methods": ["deflation"], "modes": "all-negative"}})");
    CHECK(d.accel.all_negative);
    CHECK_NOTHROW(d.validate());
  }
}

TEST_CASE("config errors", "[config]") {
  auto bad = [](const std::string& text) { CHECK_THROWS_AS(parse_config(text).validate(), ConfigError); };
  bad("{ not json");
  bad(R"({"benchmark": "pipe"})");
  bad(R"({"colour": 3})");
  bad(R"({"solver": {"tol": 0}})");
  bad(R"({"solver": {"tol": 1.5}})");
  bad(R"({"solver": {"tolerance": 1e-6}})");
  bad(R"({"fem": {"degree": 4}})");
  bad(R"({"fem": {"cells": 1}})");
  bad(R"({"accel": {"methods": ["deflation"]}})");
  bad(R"({"accel": {"methods": ["multigrid"]}})");
  bad(R"({"accel": {"modes": [[0, 3]]}})");
  bad(R"({"accel": {"modes": "some"}})");
  bad(R"({"benchmark": "scatter", "accel": {"modes": "all-negative"}})");
  bad(R"({"benchmark": "scatter", "reference": "series"})");
  bad(R"({"benchmark": "scatter", "fem": {"cells": 7}})");
  bad(R"({"sweep": {"k_min": 1.0, "k_max": 2.0}})");
  bad(R"({"k": -1.0})");
  bad(R"({"diagnostics": {"schedule": [{"l": 0, "m": 2, "J": []}]}})");
  CHECK_NOTHROW(parse_config(R"({"benchmark": "scatter", "fem": {"cells": 10}, "accel": {"modes": [[3, 0]]}})").validate());
}

TEST_CASE("quasimode and resonance tables", "[quasimodes]") {
  const ScatterGeometry g;
  const auto table = quasimode_table(g, 30.0);
  REQUIRE(std::is_sorted(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.k < b.k; }));
  auto find = [&](const std::string& fam, int n, int m) {
    for (const auto& e : table) {
      if (e.family == fam && e.n == n && e.m == m) return e.k;
    }
    FAIL("missing entry " << fam << " " << n << "," << m);
    return 0.0;
  };
  const double k30 = std::numbers::pi * std::sqrt(0.25 / 1.69 + 9.0 / 0.16);
  CHECK_THAT(find("neumann", 3, 0), WithinAbs(k30, 1e-12));
  CHECK_THAT(find("neumann", 3, 0), WithinAbs(23.593, 5e-4));
  CHECK_THAT(find("neumann", 3, 0), WithinAbs(23.591, 0.01));
  CHECK_THAT(find("dirichlet-accumulation", 3, 0), WithinAbs(23.562, 5e-4));
  CHECK_THAT(find("dirichlet", 1, 1), WithinAbs(std::numbers::pi * std::sqrt(1.0 / 1.69 + 1.0 / 0.16), 1e-12));
  for (const auto& e : table) CHECK(e.k <= 30.0);
  CHECK_THROWS_AS(quasimode_table(ScatterGeometry{.L_O = 0.0}), DomainError);

  const auto cav = cavity_resonances(14.0);
  bool has33 = false, has41 = false;
  for (const auto& e : cav) {
    if (e.n == 3 && e.m == 3) {
      has33 = true;
      CHECK_THAT(e.k, WithinAbs(13.329, 5e-4));
    }
    if (e.n == 4 && e.m == 1) {
      has41 = true;
      CHECK_THAT(e.k, WithinAbs(12.953, 5e-4));
    }
  }
  CHECK(has33);
  CHECK(has41);
}

TEST_CASE("sweep rows match their trace files", "[runner]") {
  const auto dir = scratch_dir("sweep");
  RunConfig cfg = small_cavity();
  const Problem problem = make_problem(cfg);
  const RunResult res = run_sweep(problem, dir.string());
  REQUIRE(res.rows.size() == 6);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    CHECK(r.k == cfg.sweep.k[i / 2]);
    CHECK(r.method == cfg.accel.methods[i % 2]);
    CHECK(r.error.empty());
    CHECK(r.converged);
    CHECK(r.true_relres <= 1.01e-6);
    CHECK(r.l2_error < 1e-2);
    const auto trace = dir / r.trace_file;
    REQUIRE(std::filesystem::exists(trace));
    CHECK(std::abs(last_relres(trace) - r.relres) <= 1e-12);
  }
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.rfind("k,method,n,n_def,iterations,converged,relres,true_relres,l2_error,trace_file,error\n", 0) == 0);
  CHECK(std::filesystem::exists(dir / "timing.csv"));

  SECTION("reruns are byte-identical, with and without workers") {
    const auto dir2 = scratch_dir("sweep_rerun");
    cfg.threads = 2;
    run_sweep(make_problem(cfg), dir2.string());
    CHECK(slurp(dir2 / "summary.csv") == summary);
    for (const auto& r : res.rows) CHECK(slurp(dir2 / r.trace_file) == slurp(dir / r.trace_file));
  }
}

TEST_CASE("sweep records per-point failures and continues", "[runner]") {
  Problem problem = make_problem(small_cavity());
  problem.config.sweep.k = {6.0, -1.0, 8.0};
  problem.config.accel.methods = {AccelMethod::None};
  const RunResult res = run_sweep(problem);
  REQUIRE(res.rows.size() == 3);
  CHECK(res.rows[0].error.empty());
  CHECK_FALSE(res.rows[1].error.empty());
  CHECK(std::isnan(res.rows[1].l2_error));
  CHECK(res.rows[2].error.empty());
  CHECK(res.rows[2].converged);
}

TEST_CASE("error references agree on a resolved cavity", "[runner]") {
  RunConfig cfg = small_cavity();
  cfg.fem = {16, 2};
  cfg.solver.tol = 1e-10;
  const Problem series = make_problem(cfg);
  const double e_series = run_single(series, 7.0, AccelMethod::None).record.l2_error;
  cfg.reference = ErrorReference::Direct;
  const double e_direct = run_single(make_problem(cfg), 7.0, AccelMethod::None).record.l2_error;
  cfg.reference = ErrorReference::None;
  const double e_none = run_single(make_problem(cfg), 7.0, AccelMethod::None).record.l2_error;
  CHECK(e_series < 1e-3);
  CHECK(e_direct < 1e-8);
  CHECK(std::isnan(e_none));
}

TEST_CASE("deflation spaces of the configured modes", "[runner]") {
  RunConfig cfg = small_cavity();
  cfg.accel.all_negative = true;
  const Problem p = make_problem(cfg);
  CHECK(p.deflation_space(7.0).cols() == static_cast<Eigen::Index>(negative_cavity_modes(7.0).size()));
  cfg.accel.all_negative = false;
  cfg.accel.modes = {{1, 1}, {2, 1}};
  CHECK(make_problem(cfg).deflation_space(7.0).cols() == 2);
  cfg.accel.modes.clear();
  CHECK(make_problem(cfg).deflation_space(7.0).cols() == 0);

  const SingleRun run = run_single(make_problem(small_cavity()), 7.0, AccelMethod::None);
  RunConfig dcfg = small_cavity();
  dcfg.accel.all_negative = true;
  const SingleRun defl = run_single(make_problem(dcfg), 7.0, AccelMethod::Deflation);
  CHECK(defl.record.n_def == negative_cavity_modes(7.0).size());
  CHECK(defl.record.converged);
  CHECK(defl.record.iterations < run.record.iterations);
}

TEST_CASE("negative census on a coarse cavity", "[census]") {
  RunConfig cfg = default_cavity_config();
  cfg.fem = {16, 2};
  const Problem p = make_problem(cfg);
  const LinearSystem sys = p.assemble(*cfg.k);
  const Census c = negative_census(sys);
  const auto modes = negative_cavity_modes(*cfg.k);
  REQUIRE(c.negative_count == 11);
  REQUIRE(c.entries.size() == 11);
  REQUIRE(modes.size() == 11);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < c.entries.size(); ++i) {
    const auto& e = c.entries[i];
    CHECK(e.lambda.real() < 0.0);
    CHECK(e.alignment > 0.9);
    REQUIRE_FALSE(e.modes.empty());
    if (i > 0 && e.modes == c.entries[i - 1].modes) continue;
    for (const auto& md : e.modes) CHECK(md == modes[pos++]);
  }
  CHECK(pos == modes.size());
  REQUIRE(c.rayleigh_shifts.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK_THAT(c.rayleigh_shifts[i] + *cfg.k * *cfg.k, WithinRel(cavity_eigenvalue(modes[i].n, modes[i].m), 5e-3));
  }
}

TEST_CASE("diagnose on a tiny cavity", "[diagnose]") {
  const auto dir = scratch_dir("diagnose");
  RunConfig cfg = small_cavity();
  cfg.reference = ErrorReference::None;
  cfg.diagnostics.tracked = 3;
  cfg.diagnostics.schedule = {{5, 3, {}}, {10, 4, {0, 1}}};
  const DiagnoseResult d = run_diagnose(make_problem(cfg), dir.string());
  REQUIRE(d.bounds.size() == 4);
  CHECK(d.bounds[0].kind == "thm1");
  CHECK(d.bounds[0].term_s == 1.0);
  CHECK(d.bounds[1].kind == "thm2");
  CHECK(d.bounds[1].term_s == 1.0);
  for (const auto& b : d.bounds) CHECK(b.holds());
  // Only the (1,1) mode lies below k² = 49.
  CHECK(d.tracked.size() == 1);
  CHECK(d.trajectory.snapshots.size() == d.run.record.iterations);
  for (const auto& a : d.artifacts) CHECK(std::filesystem::exists(a));
  CHECK(std::filesystem::exists(dir / "hr_7.0000.csv"));
  CHECK(std::filesystem::exists(dir / "bounds_7.0000.json"));
  CHECK(slurp(dir / "bounds_7.0000.json").find("\"term_s\"") != std::string::npos);

  cfg.k.reset();
  CHECK_THROWS_AS(run_diagnose(make_problem(cfg)), ConfigError);
}
