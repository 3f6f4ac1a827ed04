#pragma once

#include <optional>
#include <string>
#include <vector>

#include "helmkrylov/accel/accel.hpp"
#include "helmkrylov/fem/modes.hpp"

namespace hk {

/// Reference for the cavity L² error column.
enum class ErrorReference { None, Series, Direct };
const char* to_string(ErrorReference r);
ErrorReference error_reference_from_string(const std::string& name);

struct FemConfig {
  /// Grid cells per unit length (h = 1/cells).
  int cells = 32;
  int degree = 2;

  double h() const { return 1.0 / cells; }
};

struct SolverConfig {
  double tol = 1e-6;
  Index max_iter = 2000;
  std::optional<Index> restart;
  RecordLevel record = RecordLevel::Residuals;
  Index snapshot_stride = 10;
};

struct AccelConfig {
  std::vector<AccelMethod> methods{AccelMethod::None};
  /// Cavity: (n, m) of sin(nπx)sin(mπy). Scatter: (n, m) of the closed
  /// obstacle-cavity modes.
  std::vector<ModeIndex> modes;
  /// Cavity only: every mode with π²(n² + m²) < k².
  bool all_negative = false;
  DirichletSide dirichlet_side = DirichletSide::Opening;
  CslOptions csl;
};

struct SweepConfig {
  std::vector<double> k;
};

struct BoundSchedule {
  Index l = 0;
  Index m = 0;
  std::vector<Index> j;
};

struct DiagnosticsConfig {
  /// Iterations between HR snapshots.
  Index hr_stride = 1;
  /// Negative (cavity) or nearest-to-origin (scatter) eigenvalues tracked.
  Index tracked = 11;
  std::vector<BoundSchedule> schedule;
  bool thm2 = true;
  Index contour_samples = 128;
};

struct RunConfig {
  Benchmark benchmark = Benchmark::Cavity;
  DiagonalPattern pattern = DiagonalPattern::Random;
  ScatterGeometry geometry;
  double theta = 0.4 * 3.14159265358979323846;
  FemConfig fem;
  SolverConfig solver;
  AccelConfig accel;
  SweepConfig sweep;
  /// Wavenumber of single runs and diagnostics.
  std::optional<double> k;
  ErrorReference reference = ErrorReference::Series;
  DiagnosticsConfig diagnostics;
  std::string output = "out";
  unsigned seed = 12345;
  int threads = 1;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
  /// Points per wavelength degree/h · 2π/k at the largest wavenumber used.
  double points_per_wavelength() const;
};

RunConfig default_cavity_config();
RunConfig default_scatter_config();

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string to_json(const RunConfig& cfg);

}  // namespace hk
