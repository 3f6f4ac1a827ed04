#pragma once

#include <string>
#include <vector>

#include "helmkrylov/fem/mesh.hpp"

namespace hk {

struct QuasimodeEntry {
  /// "neumann", "dirichlet" or "dirichlet-accumulation".
  std::string family;
  int n = 0;
  int m = 0;
  double k = 0.0;
};

/// Closed-cavity wavenumbers of the obstacle: Neumann case
/// π√((m + ½)²/L_O² + n²/l_O²) for n, m ≥ 0, Dirichlet case
/// π√(m²/L_O² + n²/l_O²) for n, m ≥ 1, and the accumulation points πn/l_O.
/// Entries up to k_max, sorted by k.
std::vector<QuasimodeEntry> quasimode_table(const ScatterGeometry& geom, double k_max = 30.0);

/// Closed unit-square resonances π√(n² + m²) up to k_max.
std::vector<QuasimodeEntry> cavity_resonances(double k_max);

}  // namespace hk
