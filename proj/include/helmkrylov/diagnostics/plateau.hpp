#pragma once

#include <optional>
#include <vector>

#include "helmkrylov/diagnostics/harmonic_ritz.hpp"

namespace hk {

struct PlateauOptions {
  Index window = 10;
  /// A window is flat when r[i + window] > (1 − max_decrease)·r[i].
  double max_decrease = 0.02;
  Index drop_window = 20;
  /// A drop needs r[end + drop_window] ≤ drop_factor·r[end].
  double drop_factor = 0.5;
};

struct Plateau {
  Index start = 0;
  Index end = 0;
  bool dropped = false;

  Index length() const { return end - start; }
  bool contains(Index l) const { return l >= start && l <= end; }
};

/// Maximal runs of flat windows in a residual history; `end` is the last
/// iteration covered by a flat window.
std::vector<Plateau> detect_plateaus(const std::vector<double>& residuals,
                                     const PlateauOptions& opts = {});

/// Plateaus followed by a drop.
std::vector<Plateau> plateau_events(const std::vector<double>& residuals,
                                    const PlateauOptions& opts = {});

struct PlateauSync {
  Plateau plateau;
  /// Tracked eigenvalue assigned to the plateau.
  std::optional<Index> eigen_id;
  std::optional<Index> first_within_10;
  std::optional<Index> first_within_1;
  bool synchronized = false;
};

/// Assigns to each plateau a distinct tracked eigenvalue whose HR distance
/// first falls below 10% inside the plateau and reaches 1% within `slack`
/// iterations of the plateau end.
std::vector<PlateauSync> synchronize(const std::vector<Plateau>& plateaus,
                                     const HrTrajectory& trajectory, Index slack = 30);

}  // namespace hk
