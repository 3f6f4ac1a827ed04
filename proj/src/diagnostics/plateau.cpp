#include "helmkrylov/diagnostics/plateau.hpp"

#include <algorithm>

namespace hk {

std::vector<Plateau> detect_plateaus(const std::vector<double>& r, const PlateauOptions& opts) {
  std::vector<Plateau> out;
  if (opts.window == 0) throw ConfigError("plateau window must be positive");
  if (r.size() <= opts.window) return out;
  const Index last = r.size() - 1;
  std::optional<Plateau> cur;
  for (Index i = 0; i + opts.window <= last; ++i) {
    const bool flat = r[i] > 0.0 && r[i + opts.window] > (1.0 - opts.max_decrease) * r[i];
    if (flat) {
      if (!cur) cur = Plateau{i, i + opts.window, false};
      cur->end = i + opts.window;
    } else if (cur) {
      out.push_back(*cur);
      cur.reset();
    }
  }
  if (cur) out.push_back(*cur);
  for (auto& p : out) {
    const Index probe = std::min(last, p.end + opts.drop_window);
    p.dropped = probe > p.end && r[probe] <= opts.drop_factor * r[p.end];
  }
  return out;
}

std::vector<Plateau> plateau_events(const std::vector<double>& r, const PlateauOptions& opts) {
  auto all = detect_plateaus(r, opts);
  std::vector<Plateau> out;
  std::copy_if(all.begin(), all.end(), std::back_inserter(out), [](const Plateau& p) { return p.dropped; });
  return out;
}

std::vector<PlateauSync> synchronize(const std::vector<Plateau>& plateaus, const HrTrajectory& traj,
                                     Index slack) {
  const Index ne = static_cast<Index>(traj.tracked.size());
  std::vector<std::optional<Index>> t10(ne), t1(ne);
  for (Index e = 0; e < ne; ++e) {
    t10[e] = traj.first_within(e, 0.1);
    t1[e] = traj.first_within(e, 0.01);
  }
  std::vector<bool> used(ne, false);
  std::vector<PlateauSync> out;
  for (const auto& p : plateaus) {
    PlateauSync s;
    s.plateau = p;
    // Prefer the eigenvalue whose 1% crossing is closest to the plateau end.
    Index best_gap = 0;
    for (Index e = 0; e < ne; ++e) {
      if (used[e] || !t10[e] || !t1[e] || !p.contains(*t10[e])) continue;
      const Index gap = *t1[e] > p.end ? *t1[e] - p.end : p.end - *t1[e];
      if (!s.eigen_id || gap < best_gap) {
        s.eigen_id = e;
        best_gap = gap;
      }
    }
    if (s.eigen_id) {
      used[*s.eigen_id] = true;
      s.first_within_10 = t10[*s.eigen_id];
      s.first_within_1 = t1[*s.eigen_id];
      s.synchronized = best_gap <= slack;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace hk
