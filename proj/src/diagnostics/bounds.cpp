#include "helmkrylov/diagnostics/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "helmkrylov/linalg/io.hpp"

namespace hk {

namespace {

double cross(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

std::vector<cplx> convex_hull(std::vector<cplx> pts) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<cplx> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

std::vector<cplx> inflated_hull(const std::vector<cplx>& pts, double delta) {
  constexpr int kDirs = 24;
  std::vector<cplx> cloud;
  cloud.reserve(pts.size() * kDirs);
  for (const auto& p : pts) {
    for (int d = 0; d < kDirs; ++d) {
      cloud.push_back(p + std::polar(delta, 2.0 * std::numbers::pi * d / kDirs));
    }
  }
  return convex_hull(std::move(cloud));
}

int polygon_winding(const std::vector<cplx>& poly, cplx z) {
  int w = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = poly[i], b = poly[(i + 1) % n];
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && cross(a, b, z) > 0) ++w;
    } else if (b.imag() <= z.imag() && cross(a, b, z) < 0) {
      --w;
    }
  }
  return w;
}

bool segments_cross(cplx a, cplx b, cplx c, cplx d) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool polygons_overlap(const std::vector<cplx>& p, const std::vector<cplx>& q) {
  for (const auto& v : p) if (polygon_winding(q, v) != 0) return true;
  for (const auto& v : q) if (polygon_winding(p, v) != 0) return true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (segments_cross(p[i], p[(i + 1) % p.size()], q[j], q[(j + 1) % q.size()])) return true;
    }
  }
  return false;
}

double polygon_length(const std::vector<cplx>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[(i + 1) % p.size()] - p[i]);
  return s;
}

void split_components(const std::vector<cplx>& set, const std::vector<cplx>& avoid, double delta,
                      std::vector<std::vector<cplx>>& out) {
  auto poly = inflated_hull(set, delta);
  const cplx* bad = nullptr;
  for (const auto& p : avoid) {
    if (polygon_winding(poly, p) != 0) {
      bad = &p;
      break;
    }
  }
  if (!bad) {
    out.push_back(std::move(poly));
    return;
  }
  // Principal axis of the set, then the perpendicular one.
  cplx mean = 0.0;
  for (const auto& p : set) mean += p;
  mean /= static_cast<double>(set.size());
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& p : set) {
    const cplx d = p - mean;
    sxx += d.real() * d.real();
    syy += d.imag() * d.imag();
    sxy += d.real() * d.imag();
  }
  const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  for (double a : {angle, angle + 0.5 * std::numbers::pi}) {
    const cplx dir = std::polar(1.0, a);
    auto proj = [&](cplx z) { return (z * std::conj(dir)).real(); };
    std::vector<cplx> lo, hi;
    for (const auto& p : set) (proj(p) < proj(*bad) ? lo : hi).push_back(p);
    if (!lo.empty() && !hi.empty()) {
      split_components(lo, avoid, delta, out);
      split_components(hi, avoid, delta, out);
      return;
    }
  }
  throw ContourError("default contour: cannot separate the deflated eigenvalues from the rest");
}

std::vector<Index> complement(Index n, const std::vector<Index>& j) {
  std::set<Index> js(j.begin(), j.end());
  if (js.size() != j.size()) throw DomainError("eigenvalue selection has duplicates");
  for (Index i : j) {
    if (i >= n) throw DomainError("eigenvalue selection out of range");
  }
  std::vector<Index> c;
  for (Index i = 0; i < n; ++i) {
    if (!js.count(i)) c.push_back(i);
  }
  return c;
}

Vec gather(const Vec& v, const std::vector<Index>& idx) {
  Vec out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
  return out;
}

// Common part of both reports: HR matching at l and the measured ratio.
BoundReport start_report(const char* kind, const Vec& eigenvalues, const GmresTrace& trace, Index l,
                         Index m, const std::vector<Index>& j) {
  if (l == 0 || m == 0) throw DomainError("bound: l and m must be positive");
  if (l + m >= trace.residual_norms.size()) {
    throw DomainError("bound: iteration " + std::to_string(l + m) + " not in the trace");
  }
  if (!trace.has_snapshot(l) || !trace.has_snapshot(l + m) ||
      trace.cycle_of(l).start != trace.cycle_of(l + m).start) {
    throw DomainError("bound: iterations l and l+m must lie in one GMRES cycle");
  }
  if (j.size() > l - trace.cycle_of(l).start) throw DomainError("bound: |J| exceeds the number of HR values");
  BoundReport r;
  r.kind = kind;
  r.l = l;
  r.m = m;
  r.j = j;
  r.lambda_j = gather(eigenvalues, j);
  const Vec hr = harmonic_ritz(trace.hessenberg(l));
  const HrMatch match = match_nearest(r.lambda_j, hr);
  r.nu_j.resize(r.lambda_j.size());
  for (std::size_t i = 0; i < match.index.size(); ++i) r.nu_j[static_cast<Eigen::Index>(i)] = hr[match.index[i]];
  const double rl = trace.residual_norms[l];
  r.measured = rl == 0.0 ? 0.0 : trace.residual_norms[l + m] / rl;
  return r;
}

}  // namespace

double Contour::length() const {
  double s = 0.0;
  for (const auto& c : components) s += polygon_length(c);
  return s;
}

int Contour::winding(cplx z) const {
  int w = 0;
  for (const auto& c : components) w += polygon_winding(c, z);
  return w;
}

std::vector<cplx> Contour::samples(Index n) const {
  std::vector<cplx> out;
  const double total = length();
  for (const auto& c : components) {
    const double lc = polygon_length(c);
    const Index nc = std::max<Index>(8, static_cast<Index>(std::llround(static_cast<double>(n) * lc / total)));
    const double step = lc / static_cast<double>(nc);
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (Index s = 0; s < nc; ++s) {
      const double t = step * static_cast<double>(s);
      while (edge + 1 < c.size() && edge_start + std::abs(c[(edge + 1) % c.size()] - c[edge]) <= t) {
        edge_start += std::abs(c[(edge + 1) % c.size()] - c[edge]);
        ++edge;
      }
      const cplx a = c[edge], b = c[(edge + 1) % c.size()];
      const double len = std::abs(b - a);
      out.push_back(len > 0.0 ? a + (b - a) * ((t - edge_start) / len) : a);
    }
  }
  return out;
}

double Contour::max_spacing(Index n) const {
  double worst = 0.0;
  const double total = length();
  for (const auto& c : components) {
    const double lc = polygon_length(c);
    const Index nc = std::max<Index>(8, static_cast<Index>(std::llround(static_cast<double>(n) * lc / total)));
    worst = std::max(worst, lc / static_cast<double>(nc));
  }
  return worst;
}

Contour circle_contour(cplx centre, double radius, Index vertices) {
  Contour c;
  c.components.emplace_back();
  for (Index i = 0; i < vertices; ++i) {
    c.components.back().push_back(centre + std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(i) /
                                                                  static_cast<double>(vertices)));
  }
  return c;
}

Contour default_contour(const Vec& eigenvalues, const std::vector<Index>& j) {
  const auto comp = complement(static_cast<Index>(eigenvalues.size()), j);
  Contour c;
  if (comp.empty()) return c;
  std::vector<cplx> in, avoid;
  for (Index i : comp) in.push_back(eigenvalues[static_cast<Eigen::Index>(i)]);
  for (Index i : j) avoid.push_back(eigenvalues[static_cast<Eigen::Index>(i)]);
  // The origin is kept outside as well, where q_m(0) = 1 pins the min-max term.
  avoid.push_back(0.0);
  double delta = std::numeric_limits<double>::infinity();
  for (const auto& p : in) {
    for (const auto& q : avoid) delta = std::min(delta, std::abs(p - q));
  }
  delta *= 0.5;
  if (!(delta > 0.0)) throw ContourError("default contour: zero separation");
  split_components(in, avoid, delta, c.components);
  for (std::size_t a = 0; a < c.components.size(); ++a) {
    for (std::size_t b = a + 1; b < c.components.size(); ++b) {
      if (polygons_overlap(c.components[a], c.components[b])) {
        throw ContourError("default contour: components overlap; supply a contour");
      }
    }
  }
  return c;
}

BoundReport bound_thm1(const DenseEig& eig, const GmresTrace& trace, Index l, Index m,
                       const std::vector<Index>& j, const BoundOptions& opts) {
  if (eig.condition.size() != eig.values.size()) throw DomainError("bound_thm1: full eigendecomposition required");
  BoundReport r = start_report("thm1", eig.values, trace, l, m, j);
  const auto comp = complement(eig.size(), j);
  const Vec lc = gather(eig.values, comp);
  r.term_kappa = 0.0;
  for (Index i : comp) r.term_kappa += eig.condition[static_cast<Eigen::Index>(i)];
  r.term_s = s_ratio(r.lambda_j, r.nu_j, lc);
  const auto mm = minimax_poly(lc, m, opts.minimax);
  r.term_minimax = mm.value;
  r.minimax_certified = mm.certified;
  r.bound = r.term_kappa * r.term_s * r.term_minimax;
  return r;
}

BoundReport bound_thm2(const SminFn& smin, double anorm, const Vec& eigenvalues,
                       const Contour& contour, const GmresTrace& trace, Index l, Index m,
                       const std::vector<Index>& j, const BoundOptions& opts) {
  const auto comp = complement(static_cast<Index>(eigenvalues.size()), j);
  for (Index i = 0; i < static_cast<Index>(eigenvalues.size()); ++i) {
    const bool inside = std::find(comp.begin(), comp.end(), i) != comp.end();
    const int w = contour.winding(eigenvalues[static_cast<Eigen::Index>(i)]);
    if (w != (inside ? 1 : 0)) {
      std::ostringstream os;
      os << "contour winding " << w << " around eigenvalue " << i << " (expected " << (inside ? 1 : 0) << ")";
      throw ContourError(os.str());
    }
  }
  BoundReport r = start_report("thm2", eigenvalues, trace, l, m, j);
  Index n = std::max<Index>(opts.samples, 64);
  std::vector<cplx> pts;
  std::vector<double> sv;
  double eps = 0.0;
  for (;;) {
    pts = contour.samples(n);
    sv.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sv[i] = smin(pts[i]);
      if (sv[i] <= 1e-12 * anorm) throw ContourError("contour passes through the spectrum");
    }
    eps = *std::min_element(sv.begin(), sv.end()) - 0.5 * contour.max_spacing(n);
    if (eps > 0.0) break;
    if (2 * n > opts.max_samples) throw ContourError("contour too close to the spectrum for certified sampling");
    n *= 2;
  }
  Vec zs(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) zs[static_cast<Eigen::Index>(i)] = pts[i];
  r.samples = pts.size();
  r.eps = eps;
  r.contour_length = contour.length();
  r.term_kappa = r.contour_length / (2.0 * std::numbers::pi * eps);
  r.term_s = s_ratio(r.lambda_j, r.nu_j, zs);
  const auto mm = minimax_poly(zs, m, opts.minimax);
  r.term_minimax = mm.value;
  r.minimax_certified = mm.certified;
  r.bound = r.term_kappa * r.term_s * r.term_minimax;
  return r;
}

SminFn dense_smin(const DenseMatrix& a) {
  return [a](cplx z) {
    DenseMatrix s = a;
    s.diagonal().array() -= z;
    return smallest_singular_value(s).value;
  };
}

SminFn sparse_smin(const SparseMatrix& a) {
  auto p = std::make_shared<const SparseMatrix>(a);
  return [p](cplx z) { return smallest_singular_value(shifted(*p, z)).value; };
}

SminFn normal_smin(const Vec& eigenvalues) {
  return [eigenvalues](cplx z) {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) d = std::min(d, std::abs(eigenvalues[i] - z));
    return d;
  };
}

BoundReport bound_thm2(const DenseMatrix& a, const Vec& eigenvalues, const Contour& contour,
                       const GmresTrace& trace, Index l, Index m, const std::vector<Index>& j,
                       const BoundOptions& opts) {
  Eigen::JacobiSVD<DenseMatrix> svd(a);
  return bound_thm2(dense_smin(a), svd.singularValues()[0], eigenvalues, contour, trace, l, m, j, opts);
}

BoundReport bound_thm2(const SparseMatrix& a, const Vec& eigenvalues, const Contour& contour,
                       const GmresTrace& trace, Index l, Index m, const std::vector<Index>& j,
                       const BoundOptions& opts) {
  return bound_thm2(sparse_smin(a), norm2_estimate(a), eigenvalues, contour, trace, l, m, j, opts);
}

DenseMatrix spectral_projector(const DenseEig& eig, const std::vector<Index>& j) {
  if (eig.left.cols() != eig.right.cols() || eig.left.size() == 0) {
    if (eig.size() > 0) throw DomainError("spectral projector: left eigenvectors required");
  }
  const auto comp = complement(eig.size(), j);
  for (Index a : j) {
    const cplx la = eig.values[static_cast<Eigen::Index>(a)];
    for (Index b : comp) {
      const cplx lb = eig.values[static_cast<Eigen::Index>(b)];
      if (std::abs(la - lb) <= 1e-10 * std::max(1.0, std::abs(la))) {
        throw DomainError("spectral projector: selection splits an eigenvalue cluster");
      }
    }
  }
  const Eigen::Index n = eig.right.rows();
  DenseMatrix p = DenseMatrix::Zero(n, n);
  for (Index a : j) {
    const auto i = static_cast<Eigen::Index>(a);
    p += eig.right.col(i) * eig.left.col(i).adjoint();
  }
  return p;
}

ResolventField resolvent_grid(const SminFn& smin, const Box& box, Index nx, Index ny) {
  if (nx == 0 || ny == 0) throw DomainError("resolvent grid: empty grid");
  ResolventField f;
  auto axis = [](double lo, double hi, Index n) {
    std::vector<double> v(n);
    for (Index i = 0; i < n; ++i) {
      v[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
  };
  f.re = axis(box.re_min, box.re_max, nx);
  f.im = axis(box.im_min, box.im_max, ny);
  f.values.resize(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nx));
  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) {
      f.values(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)) = smin(cplx(f.re[ix], f.im[iy]));
    }
  }
  return f;
}

ResolventField resolvent_grid(const DenseMatrix& a, const Box& box, Index nx, Index ny) {
  return resolvent_grid(dense_smin(a), box, nx, ny);
}

ResolventField resolvent_grid(const SparseMatrix& a, const Box& box, Index nx, Index ny) {
  return resolvent_grid(sparse_smin(a), box, nx, ny);
}

void ResolventField::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << "re,im,smin\n";
  for (std::size_t iy = 0; iy < im.size(); ++iy) {
    for (std::size_t ix = 0; ix < re.size(); ++ix) {
      os << format_double(re[ix]) << ',' << format_double(im[iy]) << ','
         << format_double(values(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix))) << '\n';
    }
  }
}

}  // namespace hk
