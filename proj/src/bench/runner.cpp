#include "helmkrylov/bench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/LU>
#include <Eigen/SVD>
#include <json.hpp>

#include "helmkrylov/linalg/io.hpp"

namespace hk {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool needs_csl(AccelMethod m) {
  return m == AccelMethod::Csl || m == AccelMethod::CslDeflation || m == AccelMethod::Additive;
}

bool needs_basis(AccelMethod m) {
  return m == AccelMethod::Deflation || m == AccelMethod::CslDeflation || m == AccelMethod::Additive;
}

GmresOptions gmres_options(const SolverConfig& s) {
  GmresOptions o;
  o.tol = s.tol;
  o.max_iter = s.max_iter;
  o.restart = s.restart;
  o.record = s.record;
  o.snapshot_stride = s.snapshot_stride;
  return o;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// M-orthonormal basis coefficients: returns X R^{-1} with R from the
// Cholesky factor of X* M X.
DenseMatrix m_orthonormal(const DenseMatrix& x, const SparseMatrix& m) {
  DenseMatrix mx(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) mx.col(j) = m.multiply(x.col(j));
  const DenseMatrix g = x.adjoint() * mx;
  Eigen::LLT<DenseMatrix> llt(0.5 * (g + g.adjoint()));
  if (llt.info() != Eigen::Success) throw Error("census: Gram matrix not positive definite");
  const DenseMatrix rinv = llt.matrixU().solve(DenseMatrix::Identity(x.cols(), x.cols()));
  return x * rinv;
}

double span_alignment(const DenseMatrix& v, const DenseMatrix& z, const SparseMatrix& m) {
  const DenseMatrix qv = m_orthonormal(v, m);
  const DenseMatrix qz = m_orthonormal(z, m);
  DenseMatrix mz(qz.rows(), qz.cols());
  for (Eigen::Index j = 0; j < qz.cols(); ++j) mz.col(j) = m.multiply(qz.col(j));
  Eigen::JacobiSVD<DenseMatrix> svd(qv.adjoint() * mz);
  return svd.singularValues().minCoeff();
}

}  // namespace

LinearSystem Problem::assemble(double k) const {
  if (config.benchmark == Benchmark::Cavity) return assemble_cavity(space, k);
  ScatterGeometry g = config.geometry;
  g.h = config.fem.h();
  g.pattern = config.pattern;
  return assemble_scatter(space, k, g, config.theta);
}

DenseMatrix Problem::deflation_space(double k) const {
  std::vector<ScalarField> fields;
  if (config.benchmark == Benchmark::Cavity) {
    const auto modes = config.accel.all_negative ? negative_cavity_modes(k) : config.accel.modes;
    for (const auto& md : modes) fields.push_back(cavity_mode(md.n, md.m));
  } else {
    ScatterGeometry g = config.geometry;
    g.h = config.fem.h();
    for (const auto& md : config.accel.modes) {
      fields.push_back(open_cavity_mode(g, md.n, md.m, config.accel.dirichlet_side));
    }
  }
  if (fields.empty()) return DenseMatrix(static_cast<Eigen::Index>(space->ndof_free()), 0);
  return deflation_vectors(*space, fields);
}

Problem make_problem(const RunConfig& cfg) {
  cfg.validate();
  Problem p;
  p.config = cfg;
  if (cfg.benchmark == Benchmark::Cavity) {
    auto mesh = std::make_shared<const Mesh>(build_mesh_cavity(cfg.fem.h(), cfg.pattern));
    p.space = std::make_shared<const FeSpace>(mesh, cfg.fem.degree);
  } else {
    ScatterGeometry g = cfg.geometry;
    g.h = cfg.fem.h();
    g.pattern = cfg.pattern;
    auto mesh = std::make_shared<const Mesh>(build_mesh_scatter(g));
    p.space = std::make_shared<const FeSpace>(mesh, cfg.fem.degree);
  }
  return p;
}

SingleRun run_single(const Problem& problem, double k, AccelMethod method) {
  const auto t0 = Clock::now();
  const LinearSystem sys = problem.assemble(k);
  const double assembly = seconds_since(t0);
  SingleRun run = run_single(problem, sys, method);
  run.record.assembly_seconds = assembly;
  return run;
}

SingleRun run_single(const Problem& problem, const LinearSystem& sys, AccelMethod method) {
  const RunConfig& cfg = problem.config;
  SingleRun run;
  SolveRecord& rec = run.record;
  rec.k = sys.k;
  rec.method = method;
  rec.n = sys.size();
  rec.l2_error = std::numeric_limits<double>::quiet_NaN();

  const auto t0 = Clock::now();
  auto a = std::make_shared<const SparseMatrix>(sys.A);
  std::shared_ptr<const CslPreconditioner> pc;
  if (needs_csl(method)) pc = std::make_shared<const CslPreconditioner>(build_csl(sys, cfg.accel.csl));
  std::shared_ptr<const DeflationBasis> basis;
  if (needs_basis(method)) {
    basis = std::make_shared<const DeflationBasis>(build_deflation(*a, problem.deflation_space(sys.k)));
    rec.n_def = basis->count();
  }
  AcceleratedSystem formulation;
  switch (method) {
    case AccelMethod::None: formulation = plain_system(a, sys.b); break;
    case AccelMethod::Csl: formulation = csl_system(a, sys.b, pc); break;
    case AccelMethod::Deflation: formulation = deflated_system(a, sys.b, basis, nullptr); break;
    case AccelMethod::CslDeflation: formulation = deflated_system(a, sys.b, basis, pc); break;
    case AccelMethod::Additive: formulation = additive_coarse_correction(a, sys.b, basis, pc); break;
  }
  rec.setup_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  run.result = solve_accelerated(*a, sys.b, formulation, gmres_options(cfg.solver));
  rec.solve_seconds = seconds_since(t1);
  rec.iterations = run.result.trace.iterations;
  rec.converged = run.result.trace.converged;
  rec.relres = run.result.trace.final_relres();
  rec.true_relres = run.result.true_relres;

  if (cfg.benchmark == Benchmark::Cavity && cfg.reference == ErrorReference::Series) {
    rec.l2_error = l2_error(*problem.space, problem.space->expand(run.result.u, sys.dirichlet_values),
                            cavity_exact_solution(sys.k));
  } else if (cfg.reference == ErrorReference::Direct) {
    rec.l2_error = l2_error(sys.M, run.result.u, lu_factor(sys.A).solve(sys.b));
  }
  return run;
}

std::string format_k(double k) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << k;
  return os.str();
}

std::string trace_file_name(double k, AccelMethod method) {
  std::string m = to_string(method);
  std::replace(m.begin(), m.end(), '+', '_');
  return "trace_" + format_k(k) + "_" + m + ".csv";
}

void write_trace_csv(const std::string& path, const GmresTrace& trace) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << "iter,relres,restart\n";
  for (Index l = 0; l < trace.residual_norms.size(); ++l) {
    os << l << ',' << format_double(trace.relres(l)) << ',' << (trace.is_restart(l) ? 1 : 0) << '\n';
  }
}

void write_summary_csv(const std::string& path, const std::vector<SolveRecord>& rows) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << "k,method,n,n_def,iterations,converged,relres,true_relres,l2_error,trace_file,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << format_k(r.k) << ',' << to_string(r.method) << ',' << r.n << ',' << r.n_def << ',' << r.iterations << ','
       << (r.converged ? 1 : 0) << ',' << format_double(r.relres) << ',' << format_double(r.true_relres) << ','
       << (std::isnan(r.l2_error) ? std::string("nan") : format_double(r.l2_error)) << ',' << r.trace_file << ','
       << err << '\n';
  }
}

void write_timing_csv(const std::string& path, const std::vector<SolveRecord>& rows) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << "k,method,assembly_s,setup_s,solve_s\n";
  for (const auto& r : rows) {
    os << format_k(r.k) << ',' << to_string(r.method) << ',' << r.assembly_seconds << ',' << r.setup_seconds << ','
       << r.solve_seconds << '\n';
  }
}

RunResult run_sweep(const Problem& problem, const std::string& out_dir) {
  const RunConfig& cfg = problem.config;
  if (cfg.sweep.k.empty()) throw ConfigError("sweep: no wavenumbers configured");
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  const auto& methods = cfg.accel.methods;
  std::vector<std::vector<SolveRecord>> per_k(cfg.sweep.k.size());

  auto work = [&](std::size_t i) {
    const double k = cfg.sweep.k[i];
    const auto t0 = Clock::now();
    std::optional<LinearSystem> sys;
    std::string assembly_error;
    try {
      sys = problem.assemble(k);
    } catch (const Error& e) {
      assembly_error = e.what();
    }
    const double assembly = seconds_since(t0);
    for (AccelMethod m : methods) {
      SolveRecord rec;
      rec.k = k;
      rec.method = m;
      rec.l2_error = std::numeric_limits<double>::quiet_NaN();
      rec.assembly_seconds = assembly;
      if (!sys) {
        rec.error = assembly_error;
      } else {
        try {
          SingleRun run = run_single(problem, *sys, m);
          rec = run.record;
          rec.assembly_seconds = assembly;
          if (!out_dir.empty()) {
            rec.trace_file = trace_file_name(k, m);
            write_trace_csv(join(out_dir, rec.trace_file), run.result.trace);
          }
        } catch (const Error& e) {
          rec.error = e.what();
        }
      }
      per_k[i].push_back(rec);
    }
  };

  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), cfg.sweep.k.size());
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < cfg.sweep.k.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cfg.sweep.k.size(); i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  RunResult out;
  for (auto& rows : per_k) {
    for (auto& r : rows) {
      if (!r.trace_file.empty()) out.artifacts.push_back(join(out_dir, r.trace_file));
      out.rows.push_back(std::move(r));
    }
  }
  if (!out_dir.empty()) {
    write_summary_csv(join(out_dir, "summary.csv"), out.rows);
    write_timing_csv(join(out_dir, "timing.csv"), out.rows);
    out.artifacts.push_back(join(out_dir, "summary.csv"));
    out.artifacts.push_back(join(out_dir, "timing.csv"));
  }
  return out;
}

Vec tracked_eigenvalues(const LinearSystem& sys, Index count, unsigned seed) {
  if (count == 0) return Vec();
  ShiftInvertOptions so;
  so.seed = seed;
  if (is_hermitian(sys.A)) {
    const Index neg = hermitian_inertia(sys.A).negative;
    const Index want = std::min(count, neg);
    Index request = std::min<Index>(sys.size(), want + 8);
    for (;;) {
      const DenseEig e = shift_invert_eigs(sys.A, 0.0, request, so);
      std::vector<cplx> found;
      for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        if (e.values[i].real() < 0.0) found.push_back(e.values[i]);
      }
      if (found.size() >= want || request == sys.size()) {
        Vec out(static_cast<Eigen::Index>(std::min<std::size_t>(want, found.size())));
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = found[static_cast<std::size_t>(i)];
        return out;
      }
      request = std::min<Index>(sys.size(), 2 * request);
    }
  }
  return shift_invert_eigs(sys.A, 0.0, std::min(count, sys.size()), so).values;
}

void write_bounds_json(const std::string& path, const std::vector<BoundReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  auto cvec = [](const Vec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
    return a;
  };
  for (const auto& r : reports) {
    arr.push_back({{"kind", r.kind},
                   {"l", r.l},
                   {"m", r.m},
                   {"J", r.j},
                   {"lambda_J", cvec(r.lambda_j)},
                   {"nu_J", cvec(r.nu_j)},
                   {"term_kappa", r.term_kappa},
                   {"term_s", r.term_s},
                   {"term_minimax", r.term_minimax},
                   {"minimax_certified", r.minimax_certified},
                   {"bound", r.bound},
                   {"measured", r.measured},
                   {"holds", r.holds()},
                   {"eps", r.eps},
                   {"contour_length", r.contour_length},
                   {"samples", r.samples}});
  }
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << arr.dump(2) << '\n';
}

DiagnoseResult run_diagnose(const Problem& problem, const std::string& out_dir) {
  const RunConfig& cfg = problem.config;
  if (!cfg.k) throw ConfigError("diagnose: k is not configured");
  Problem detailed = problem;
  detailed.config.solver.record = RecordLevel::Snapshots;
  detailed.config.solver.snapshot_stride = 1;

  DiagnoseResult d;
  const LinearSystem sys = detailed.assemble(*cfg.k);
  d.run = run_single(detailed, sys, AccelMethod::None);
  const GmresTrace& tr = d.run.result.trace;

  d.tracked = tracked_eigenvalues(sys, cfg.diagnostics.tracked, cfg.seed);
  std::vector<Index> its;
  for (Index l = 1; l <= tr.iterations; l += cfg.diagnostics.hr_stride) {
    if (!tr.is_restart(l)) its.push_back(l);
  }
  d.trajectory = hr_trajectory(tr, its, d.tracked);

  std::vector<double> rel;
  for (Index l = 0; l < tr.residual_norms.size(); ++l) rel.push_back(tr.relres(l));
  d.plateaus = detect_plateaus(rel);
  d.events = plateau_events(rel);
  d.sync = synchronize(d.events, d.trajectory);

  if (!cfg.diagnostics.schedule.empty()) {
    const DenseEig eig = eig_dense(sys.A.to_dense());
    const bool normal = is_hermitian(sys.A);
    BoundOptions bo;
    bo.samples = cfg.diagnostics.contour_samples;
    if (normal) bo.max_samples = Index{1} << 22;
    const double anorm = eig.values.cwiseAbs().maxCoeff();
    std::ostringstream violations;
    for (const auto& s : cfg.diagnostics.schedule) {
      d.bounds.push_back(bound_thm1(eig, tr, s.l, s.m, s.j, bo));
      if (cfg.diagnostics.thm2) {
        const Contour gamma = default_contour(eig.values, s.j);
        d.bounds.push_back(normal ? bound_thm2(normal_smin(eig.values), anorm, eig.values, gamma, tr, s.l, s.m, s.j, bo)
                                  : bound_thm2(sys.A, eig.values, gamma, tr, s.l, s.m, s.j, bo));
      }
    }
    for (const auto& r : d.bounds) {
      if (!r.holds()) violations << r.kind << " l=" << r.l << " m=" << r.m << " bound " << r.bound << " < measured " << r.measured << "; ";
    }
    if (!violations.str().empty()) throw Error("bound violation: " + violations.str());
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string kk = format_k(*cfg.k);
    const std::string trace_path = join(out_dir, trace_file_name(*cfg.k, AccelMethod::None));
    write_trace_csv(trace_path, tr);
    const std::string hr_path = join(out_dir, "hr_" + kk + ".csv");
    d.trajectory.write_csv(hr_path);
    const std::string bounds_path = join(out_dir, "bounds_" + kk + ".json");
    write_bounds_json(bounds_path, d.bounds);
    nlohmann::json pj = nlohmann::json::array();
    for (const auto& p : d.plateaus) pj.push_back({{"start", p.start}, {"end", p.end}, {"dropped", p.dropped}});
    nlohmann::json sj = nlohmann::json::array();
    for (const auto& s : d.sync) {
      sj.push_back({{"start", s.plateau.start},
                    {"end", s.plateau.end},
                    {"eigen_id", s.eigen_id ? nlohmann::json(*s.eigen_id) : nlohmann::json(nullptr)},
                    {"first_within_10", s.first_within_10 ? nlohmann::json(*s.first_within_10) : nlohmann::json(nullptr)},
                    {"first_within_1", s.first_within_1 ? nlohmann::json(*s.first_within_1) : nlohmann::json(nullptr)},
                    {"synchronized", s.synchronized}});
    }
    nlohmann::json tj = nlohmann::json::array();
    for (Eigen::Index i = 0; i < d.tracked.size(); ++i) tj.push_back({d.tracked[i].real(), d.tracked[i].imag()});
    const std::string phase_path = join(out_dir, "plateaus_" + kk + ".json");
    std::ofstream(phase_path) << nlohmann::json{{"k", *cfg.k}, {"iterations", tr.iterations}, {"tracked", tj},
                                                {"plateaus", pj}, {"sync", sj}}.dump(2)
                              << '\n';
    d.artifacts = {trace_path, hr_path, bounds_path, phase_path};
  }
  return d;
}

Census negative_census(const LinearSystem& cavity, unsigned seed) {
  Census c;
  ShiftInvertOptions so;
  so.seed = seed;
  c.negative_count = hermitian_inertia(cavity.A).negative;
  const DenseEig e = [&] {
    // Eigenvectors of exactly the negative eigenvalues.
    Index request = c.negative_count + 8;
    for (;;) {
      DenseEig all = shift_invert_eigs(cavity.A, 0.0, std::min(request, cavity.size()), so);
      DenseEig neg;
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < all.values.size(); ++i) {
        if (all.values[i].real() < 0.0) keep.push_back(i);
      }
      if (keep.size() >= c.negative_count || request >= cavity.size()) {
        keep.resize(std::min<std::size_t>(keep.size(), c.negative_count));
        neg.values.resize(static_cast<Eigen::Index>(keep.size()));
        neg.right.resize(all.right.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t i = 0; i < keep.size(); ++i) {
          neg.values[static_cast<Eigen::Index>(i)] = all.values[keep[i]];
          neg.right.col(static_cast<Eigen::Index>(i)) = all.right.col(keep[i]);
        }
        return neg;
      }
      request *= 2;
    }
  }();
  if (e.size() != c.negative_count) throw Error("census: shift-invert missed negative eigenvalues");

  const auto modes = negative_cavity_modes(cavity.k);
  // Mode groups sharing n² + m², in table order.
  std::vector<std::vector<ModeIndex>> groups;
  for (const auto& md : modes) {
    if (groups.empty() || groups.back().front().n * groups.back().front().n + groups.back().front().m * groups.back().front().m !=
                              md.n * md.n + md.m * md.m) {
      groups.emplace_back();
    }
    groups.back().push_back(md);
  }
  // Eigenvalue clusters at 1e-3 relative spacing.
  std::vector<std::vector<Eigen::Index>> clusters;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (clusters.empty() ||
        std::abs(e.values[i] - e.values[clusters.back().back()]) > 1e-3 * std::abs(e.values[i])) {
      clusters.emplace_back();
    }
    clusters.back().push_back(i);
  }

  std::vector<bool> used(groups.size(), false);
  for (const auto& cl : clusters) {
    DenseMatrix v(e.right.rows(), static_cast<Eigen::Index>(cl.size()));
    for (std::size_t i = 0; i < cl.size(); ++i) v.col(static_cast<Eigen::Index>(i)) = e.right.col(cl[i]);
    double best = -1.0;
    std::size_t best_g = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (used[g] || groups[g].size() != cl.size()) continue;
      std::vector<ScalarField> fields;
      for (const auto& md : groups[g]) fields.push_back(cavity_mode(md.n, md.m));
      const double al = span_alignment(v, deflation_vectors(*cavity.space, fields), cavity.M);
      if (al > best) {
        best = al;
        best_g = g;
      }
    }
    CensusEntry entry;
    entry.lambda = e.values[cl.front()];
    entry.alignment = std::max(best, 0.0);
    if (best_g < groups.size()) {
      used[best_g] = true;
      entry.modes = groups[best_g];
    }
    for (std::size_t i = 0; i < cl.size(); ++i) {
      CensusEntry member = entry;
      member.lambda = e.values[cl[i]];
      c.entries.push_back(member);
    }
  }
  for (const auto& md : modes) {
    const DenseMatrix z = deflation_vectors(*cavity.space, {cavity_mode(md.n, md.m)});
    const cplx num = z.col(0).dot(cavity.K.multiply(z.col(0)));
    const cplx den = z.col(0).dot(cavity.M.multiply(z.col(0)));
    c.rayleigh_shifts.push_back((num / den).real() - cavity.k * cavity.k);
  }
  return c;
}

}  // namespace hk
