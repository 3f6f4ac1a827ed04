#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "helmkrylov/bench/quasimodes.hpp"
#include "helmkrylov/bench/runner.hpp"
#include "helmkrylov/krylov/gmres.hpp"

namespace py = pybind11;
using namespace hk;

namespace {

RunConfig config_from(const std::string& json_text) {
  RunConfig cfg = parse_config(json_text);
  cfg.validate();
  return cfg;
}

py::tuple csr(const SparseMatrix& a) {
  std::vector<long long> indptr(a.row_offsets().begin(), a.row_offsets().end());
  std::vector<long long> indices(a.col_indices().begin(), a.col_indices().end());
  Vec data = Eigen::Map<const Vec>(a.values().data(), static_cast<Eigen::Index>(a.nnz()));
  return py::make_tuple(data, indices, indptr, py::make_tuple(a.rows(), a.cols()));
}

SparseMatrix from_csr(Index rows, Index cols, const std::vector<long long>& indptr,
                      const std::vector<long long>& indices, const Vec& data) {
  return SparseMatrix(rows, cols, std::vector<Index>(indptr.begin(), indptr.end()),
                      std::vector<Index>(indices.begin(), indices.end()),
                      std::vector<cplx>(data.data(), data.data() + data.size()));
}

std::vector<int> restart_flags(const GmresTrace& t) {
  std::vector<int> out(t.residual_norms.size(), 0);
  for (Index l : t.restart_marks) {
    if (l < out.size()) out[l] = 1;
  }
  return out;
}

std::vector<double> relative(const GmresTrace& t) {
  std::vector<double> out(t.residual_norms.size());
  for (Index l = 0; l < out.size(); ++l) out[l] = t.relres(l);
  return out;
}

py::dict record_dict(const SolveRecord& r) {
  py::dict d;
  d["k"] = r.k;
  d["method"] = to_string(r.method);
  d["n"] = r.n;
  d["n_def"] = r.n_def;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["relres"] = r.relres;
  d["true_relres"] = r.true_relres;
  d["l2_error"] = r.l2_error;
  d["assembly_s"] = r.assembly_seconds;
  d["setup_s"] = r.setup_seconds;
  d["solve_s"] = r.solve_seconds;
  d["error"] = r.error;
  d["trace_file"] = r.trace_file;
  return d;
}

py::dict plateau_dict(const Plateau& p) {
  py::dict d;
  d["start"] = p.start;
  d["end"] = p.end;
  d["dropped"] = p.dropped;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GMRES on discrete Helmholtz problems: assembly, acceleration and harmonic Ritz diagnostics";

  // translators run newest first, so the subclass is registered last
  py::register_exception<Error>(m, "HelmkrylovError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("default_config", [](const std::string& benchmark) {
    if (benchmark == "cavity") return to_json(default_cavity_config());
    if (benchmark == "scatter") return to_json(default_scatter_config());
    throw ConfigError("unknown benchmark: " + benchmark);
  });
  m.def("normalize_config", [](const std::string& text) { return to_json(config_from(text)); });
  m.def("points_per_wavelength", [](const std::string& text) { return config_from(text).points_per_wavelength(); });

  m.def("assemble", [](const std::string& text, double k) {
    const RunConfig cfg = config_from(text);
    LinearSystem sys;
    {
      py::gil_scoped_release release;
      sys = make_problem(cfg).assemble(k);
    }
    py::dict d;
    d["A"] = csr(sys.A);
    d["K"] = csr(sys.K);
    d["M"] = csr(sys.M);
    d["B"] = csr(sys.B);
    d["b"] = sys.b;
    d["dirichlet_values"] = sys.dirichlet_values;
    d["k"] = sys.k;
    return d;
  });

  m.def("solve", [](const std::string& text, double k, const std::string& method) {
    const RunConfig cfg = config_from(text);
    const AccelMethod am = accel_method_from_string(method);
    std::optional<SingleRun> run;
    {
      py::gil_scoped_release release;
      run = run_single(make_problem(cfg), k, am);
    }
    py::dict d = record_dict(run->record);
    d["u"] = run->result.u;
    d["residuals"] = relative(run->result.trace);
    d["restart"] = restart_flags(run->result.trace);
    return d;
  });

  m.def(
      "sweep",
      [](const std::string& text, const std::string& out_dir) {
        const RunConfig cfg = config_from(text);
        RunResult res;
        {
          py::gil_scoped_release release;
          res = run_sweep(make_problem(cfg), out_dir);
        }
        py::list rows;
        for (const auto& r : res.rows) rows.append(record_dict(r));
        return rows;
      },
      py::arg("config"), py::arg("out_dir") = "");

  m.def(
      "diagnose",
      [](const std::string& text, const std::string& out_dir) {
        const RunConfig cfg = config_from(text);
        std::optional<DiagnoseResult> res;
        {
          py::gil_scoped_release release;
          res = run_diagnose(make_problem(cfg), out_dir);
        }
        py::dict d = record_dict(res->run.record);
        d["residuals"] = relative(res->run.result.trace);
        d["tracked"] = res->tracked;
        py::list plateaus, sync, bounds;
        for (const auto& p : res->plateaus) plateaus.append(plateau_dict(p));
        for (const auto& s : res->sync) {
          py::dict e = plateau_dict(s.plateau);
          e["eigen_id"] = s.eigen_id;
          e["synchronized"] = s.synchronized;
          sync.append(e);
        }
        for (const auto& b : res->bounds) {
          py::dict e;
          e["kind"] = b.kind;
          e["l"] = b.l;
          e["m"] = b.m;
          e["bound"] = b.bound;
          e["measured"] = b.measured;
          bounds.append(e);
        }
        d["plateaus"] = plateaus;
        d["events"] = sync;
        d["bounds"] = bounds;
        return d;
      },
      py::arg("config"), py::arg("out_dir") = "");

  m.def(
      "gmres",
      [](Index n, const std::vector<long long>& indptr, const std::vector<long long>& indices, const Vec& data,
         const Vec& b, double tol, std::optional<Index> restart, Index max_iter) {
        const SparseMatrix a = from_csr(n, n, indptr, indices, data);
        GmresOptions opts;
        opts.tol = tol;
        opts.restart = restart;
        opts.max_iter = max_iter;
        opts.record = RecordLevel::Snapshots;
        GmresResult r;
        {
          py::gil_scoped_release release;
          r = gmres(LinearOperator::from_matrix(a), b, opts);
        }
        return py::make_tuple(r.x, relative(r.trace), r.trace.converged);
      },
      py::arg("n"), py::arg("indptr"), py::arg("indices"), py::arg("data"), py::arg("b"), py::arg("tol") = 1e-6,
      py::arg("restart") = py::none(), py::arg("max_iter") = 2000);

  m.def("harmonic_ritz", [](const DenseMatrix& hbar) { return harmonic_ritz(hbar); });

  m.def("detect_plateaus", [](const std::vector<double>& residuals) {
    py::list out;
    for (const auto& p : detect_plateaus(residuals)) out.append(plateau_dict(p));
    return out;
  });

  m.def(
      "quasimodes",
      [](const std::string& text, double k_max) {
        const RunConfig cfg = config_from(text);
        const auto table = cfg.benchmark == Benchmark::Scatter ? quasimode_table(cfg.geometry, k_max)
                                                               : cavity_resonances(k_max);
        py::list out;
        for (const auto& e : table) out.append(py::make_tuple(e.family, e.n, e.m, e.k));
        return out;
      },
      py::arg("config"), py::arg("k_max") = 30.0);
}
