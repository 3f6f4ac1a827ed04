#include "helmkrylov/bench/quasimodes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hk {

std::vector<QuasimodeEntry> quasimode_table(const ScatterGeometry& geom, double k_max) {
  if (!(geom.L_O > 0.0) || !(geom.l_O > 0.0)) throw DomainError("quasimode table: L_O and l_O must be positive");
  const double pi = std::numbers::pi;
  std::vector<QuasimodeEntry> out;
  const int nmax = static_cast<int>(k_max * geom.l_O / pi) + 1;
  const int mmax = static_cast<int>(k_max * geom.L_O / pi) + 1;
  for (int n = 0; n <= nmax; ++n) {
    for (int m = 0; m <= mmax; ++m) {
      const double kn = pi * std::sqrt(std::pow(m + 0.5, 2) / (geom.L_O * geom.L_O) +
                                       static_cast<double>(n * n) / (geom.l_O * geom.l_O));
      if (kn <= k_max) out.push_back({"neumann", n, m, kn});
      if (n >= 1 && m >= 1) {
        const double kd = pi * std::sqrt(static_cast<double>(m * m) / (geom.L_O * geom.L_O) +
                                         static_cast<double>(n * n) / (geom.l_O * geom.l_O));
        if (kd <= k_max) out.push_back({"dirichlet", n, m, kd});
      }
    }
    if (n >= 1 && pi * n / geom.l_O <= k_max) out.push_back({"dirichlet-accumulation", n, 0, pi * n / geom.l_O});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  return out;
}

std::vector<QuasimodeEntry> cavity_resonances(double k_max) {
  const double pi = std::numbers::pi;
  std::vector<QuasimodeEntry> out;
  const int nmax = static_cast<int>(k_max / pi) + 1;
  for (int n = 1; n <= nmax; ++n) {
    for (int m = 1; m <= nmax; ++m) {
      const double k = pi * std::sqrt(static_cast<double>(n * n + m * m));
      if (k <= k_max) out.push_back({"cavity", n, m, k});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  return out;
}

}  // namespace hk
