#pragma once

#include <memory>
#include <string>
#include <vector>

#include "helmkrylov/bench/config.hpp"
#include "helmkrylov/diagnostics/bounds.hpp"
#include "helmkrylov/diagnostics/plateau.hpp"

namespace hk {

/// Mesh and space of a configuration, shared by every wavenumber.
struct Problem {
  RunConfig config;
  std::shared_ptr<const FeSpace> space;

  LinearSystem assemble(double k) const;
  /// Deflation vectors of the configured modes at wavenumber k (empty when
  /// no modes are configured).
  DenseMatrix deflation_space(double k) const;
};

Problem make_problem(const RunConfig& cfg);

struct SolveRecord {
  double k = 0.0;
  AccelMethod method = AccelMethod::None;
  Index n = 0;
  Index n_def = 0;
  Index iterations = 0;
  bool converged = false;
  double relres = 0.0;
  double true_relres = 0.0;
  /// NaN when no reference is configured or the solve failed.
  double l2_error = 0.0;
  double assembly_seconds = 0.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::string error;
  std::string trace_file;
};

struct SingleRun {
  SolveRecord record;
  AccelResult result;
};

/// One solve at wavenumber k with the given method, recording per the
/// solver configuration.
SingleRun run_single(const Problem& problem, double k, AccelMethod method);
SingleRun run_single(const Problem& problem, const LinearSystem& sys, AccelMethod method);

struct RunResult {
  std::vector<SolveRecord> rows;
  std::vector<std::string> artifacts;
};

/// Every (k, method) pair of the sweep. Failures are recorded in the row's
/// `error` and the sweep continues. With `out_dir` non-empty writes
/// summary.csv, timing.csv and trace_<k>_<method>.csv.
RunResult run_sweep(const Problem& problem, const std::string& out_dir = {});

void write_summary_csv(const std::string& path, const std::vector<SolveRecord>& rows);
void write_timing_csv(const std::string& path, const std::vector<SolveRecord>& rows);
/// iter,relres,restart rows of a residual history.
void write_trace_csv(const std::string& path, const GmresTrace& trace);
std::string trace_file_name(double k, AccelMethod method);
std::string format_k(double k);

/// Eigenvalues of the system matrix used by the diagnostics: negative ones
/// for the cavity (sorted nearest zero first), nearest-origin ones otherwise.
/// `seed` fixes the random start block of the shift-invert iteration.
Vec tracked_eigenvalues(const LinearSystem& sys, Index count, unsigned seed = 12345);

struct DiagnoseResult {
  SingleRun run;
  Vec tracked;
  HrTrajectory trajectory;
  std::vector<Plateau> plateaus;
  std::vector<Plateau> events;
  std::vector<PlateauSync> sync;
  std::vector<BoundReport> bounds;
  std::vector<std::string> artifacts;
};

/// Full-detail unaccelerated solve at config.k with HR trajectory, plateau
/// detection and bound reports for the configured schedule. The bound
/// reports need the dense spectrum (order ≤ kDefaultDenseEigCap). A bound
/// violation throws Error.
DiagnoseResult run_diagnose(const Problem& problem, const std::string& out_dir = {});

void write_bounds_json(const std::string& path, const std::vector<BoundReport>& reports);

/// Negative eigenvalues of the cavity matrix matched to Laplacian modes.
struct CensusEntry {
  cplx lambda;
  /// Modes whose interpolants span the eigenvector cluster of λ.
  std::vector<ModeIndex> modes;
  /// Smallest cosine of the principal angles between the two spans.
  double alignment = 0.0;
};

struct Census {
  /// Negative eigenvalues by Sylvester inertia.
  Index negative_count = 0;
  std::vector<CensusEntry> entries;
  /// Generalized eigenvalues μ − k² of the interpolants, same order.
  std::vector<double> rayleigh_shifts;
};

Census negative_census(const LinearSystem& cavity, unsigned seed = 12345);

}  // namespace hk
