#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "helmkrylov/bench/quasimodes.hpp"
#include "helmkrylov/bench/runner.hpp"
#include "helmkrylov/linalg/io.hpp"

namespace {

using namespace hk;

struct Common {
  std::string config;
  std::string out;
  std::optional<unsigned> seed;
  std::optional<int> threads;
  std::optional<double> k;
};

void add_common(CLI::App* cmd, Common& c, bool with_k) {
  cmd->add_option("-c,--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", c.out, "output directory (overrides the config)");
  cmd->add_option("--seed", c.seed, "seed of the random eigensolver start block");
  cmd->add_option("--threads", c.threads, "sweep worker threads")->check(CLI::PositiveNumber);
  if (with_k) cmd->add_option("-k,--wavenumber", c.k, "wavenumber (overrides the config)");
}

RunConfig resolve(const Common& c, std::optional<Benchmark> expected) {
  RunConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else {
    cfg = expected == Benchmark::Scatter ? default_scatter_config() : default_cavity_config();
  }
  if (expected && cfg.benchmark != *expected) {
    throw ConfigError(std::string("config describes a ") + to_string(cfg.benchmark) + " run");
  }
  if (!c.out.empty()) cfg.output = c.out;
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (c.k) cfg.k = *c.k;
  cfg.validate();
  const double d = cfg.points_per_wavelength();
  if (d < 30.0) {
    std::cerr << "warning: " << d << " points per wavelength (below 30)\n";
  }
  return cfg;
}

void print_row(const SolveRecord& r) {
  std::cout << "k=" << format_k(r.k) << " method=" << to_string(r.method) << " n=" << r.n
            << " iterations=" << r.iterations << " converged=" << (r.converged ? "yes" : "no")
            << " relres=" << r.relres;
  if (!std::isnan(r.l2_error)) std::cout << " l2_error=" << r.l2_error;
  if (!r.error.empty()) std::cout << " error=\"" << r.error << '"';
  std::cout << '\n';
}

int run_point(const RunConfig& cfg) {
  if (!cfg.k) throw ConfigError("no wavenumber: set \"k\" or pass -k");
  const Problem problem = make_problem(cfg);
  std::filesystem::create_directories(cfg.output);
  const LinearSystem sys = problem.assemble(*cfg.k);
  std::vector<SolveRecord> rows;
  for (AccelMethod m : cfg.accel.methods) {
    SingleRun run = run_single(problem, sys, m);
    run.record.trace_file = trace_file_name(*cfg.k, m);
    write_trace_csv((std::filesystem::path(cfg.output) / run.record.trace_file).string(), run.result.trace);
    print_row(run.record);
    rows.push_back(run.record);
  }
  write_summary_csv((std::filesystem::path(cfg.output) / "summary.csv").string(), rows);
  write_timing_csv((std::filesystem::path(cfg.output) / "timing.csv").string(), rows);
  return 0;
}

int run_sweep_cmd(const RunConfig& cfg) {
  const Problem problem = make_problem(cfg);
  const RunResult res = run_sweep(problem, cfg.output);
  int failures = 0;
  for (const auto& r : res.rows) {
    print_row(r);
    if (!r.error.empty()) ++failures;
  }
  std::cout << res.rows.size() << " rows, " << failures << " failed; results in " << cfg.output << '\n';
  return 0;
}

int run_diagnose_cmd(const RunConfig& cfg) {
  const Problem problem = make_problem(cfg);
  const DiagnoseResult d = run_diagnose(problem, cfg.output);
  print_row(d.run.record);
  std::cout << "tracked eigenvalues:";
  for (Eigen::Index i = 0; i < d.tracked.size(); ++i) std::cout << ' ' << d.tracked[i].real();
  std::cout << '\n';
  for (const auto& s : d.sync) {
    std::cout << "plateau " << s.plateau.start << "-" << s.plateau.end;
    if (s.eigen_id) std::cout << " eigenvalue #" << *s.eigen_id;
    std::cout << (s.synchronized ? " synchronized" : " not synchronized") << '\n';
  }
  for (const auto& b : d.bounds) {
    std::cout << b.kind << " l=" << b.l << " m=" << b.m << " bound=" << b.bound << " measured=" << b.measured << '\n';
  }
  return 0;
}

int run_quasimodes(const RunConfig& cfg, double k_max) {
  std::filesystem::create_directories(cfg.output);
  const auto table = cfg.benchmark == Benchmark::Scatter ? quasimode_table(cfg.geometry, k_max)
                                                         : cavity_resonances(k_max);
  const std::string path = (std::filesystem::path(cfg.output) / "quasimodes.csv").string();
  std::ofstream os(path);
  os << "family,n,m,k\n";
  std::cout << "family,n,m,k\n";
  for (const auto& e : table) {
    os << e.family << ',' << e.n << ',' << e.m << ',' << format_double(e.k) << '\n';
    std::cout << e.family << ',' << e.n << ',' << e.m << ',' << e.k << '\n';
  }
  return 0;
}

int run_export(const RunConfig& cfg) {
  if (!cfg.k) throw ConfigError("no wavenumber: set \"k\" or pass -k");
  const Problem problem = make_problem(cfg);
  const LinearSystem sys = problem.assemble(*cfg.k);
  const std::filesystem::path dir(cfg.output);
  std::filesystem::create_directories(dir);
  const std::string kk = format_k(*cfg.k);
  write_matrix_market((dir / ("A_" + kk + ".mtx")).string(), sys.A);
  write_matrix_market((dir / "K.mtx").string(), sys.K);
  write_matrix_market((dir / "M.mtx").string(), sys.M);
  if (sys.B.nnz() > 0) write_matrix_market((dir / "B.mtx").string(), sys.B);
  write_matrix_market_dense((dir / ("b_" + kk + ".mtx")).string(), sys.b);
  std::cout << "n=" << sys.size() << " nnz=" << sys.A.nnz() << " written to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helmholtz GMRES benchmarks with deflation, CSL preconditioning and harmonic Ritz diagnostics"};
  app.require_subcommand(1);

  Common cavity, scatter, sweep, diagnose, quasi, exported;
  double k_max = 30.0;
  auto* c_cav = app.add_subcommand("cavity", "single solve of the closed cavity problem");
  add_common(c_cav, cavity, true);
  auto* c_sca = app.add_subcommand("scatter", "single solve of the open-cavity scattering problem");
  add_common(c_sca, scatter, true);
  auto* c_swp = app.add_subcommand("sweep", "solve over the configured wavenumber range");
  add_common(c_swp, sweep, false);
  auto* c_dia = app.add_subcommand("diagnose", "harmonic Ritz trajectory, plateaus and convergence bounds");
  add_common(c_dia, diagnose, true);
  auto* c_qm = app.add_subcommand("quasimodes", "table of cavity resonances or obstacle quasimode wavenumbers");
  add_common(c_qm, quasi, false);
  c_qm->add_option("--k-max", k_max, "largest wavenumber listed");
  auto* c_exp = app.add_subcommand("export-matrix", "write the assembled system in Matrix Market format");
  add_common(c_exp, exported, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_cav->parsed()) return run_point(resolve(cavity, Benchmark::Cavity));
    if (c_sca->parsed()) return run_point(resolve(scatter, Benchmark::Scatter));
    if (c_swp->parsed()) return run_sweep_cmd(resolve(sweep, std::nullopt));
    if (c_dia->parsed()) return run_diagnose_cmd(resolve(diagnose, std::nullopt));
    if (c_qm->parsed()) return run_quasimodes(resolve(quasi, std::nullopt), k_max);
    if (c_exp->parsed()) return run_export(resolve(exported, std::nullopt));
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
