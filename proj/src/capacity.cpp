// SPDX-License-Identifier: Apache-2.0

#include "ldk/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <utility>

namespace ldk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seg_distance(double px, double py, double ax, double ay, double bx,
                    double by) {
  double vx = bx - ax, vy = by - ay;
  double wx = px - ax, wy = py - ay;
  double vv = vx * vx + vy * vy;
  double t = vv > 0 ? (vx * wx + vy * wy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(wx - t * vx, wy - t * vy);
}

bool polygon_interior(const std::vector<std::pair<double, double>>& vs,
                      double x, double y) {
  // even-odd ray crossing
  bool in = false;
  size_t n = vs.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    double xi = vs[i].first, yi = vs[i].second;
    double xj = vs[j].first, yj = vs[j].second;
    bool cross = (yi > y) != (yj > y);
    if (cross && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

}  // namespace

Region Region::disk(double cx, double cy, double r) {
  Region e;
  e.kind = Kind::disk;
  e.cx = cx;
  e.cy = cy;
  e.r = r;
  e.validate();
  return e;
}

Region Region::segment(double ax, double ay, double bx, double by) {
  Region e;
  e.kind = Kind::segment;
  e.ax = ax;
  e.ay = ay;
  e.bx = bx;
  e.by = by;
  e.validate();
  return e;
}

Region Region::polygon(std::vector<std::pair<double, double>> vs) {
  Region e;
  e.kind = Kind::polygon;
  e.vertices = std::move(vs);
  e.validate();
  return e;
}

Region Region::annulus(double cx, double cy, double r_inner, double r_outer) {
  Region e;
  e.kind = Kind::annulus;
  e.cx = cx;
  e.cy = cy;
  e.r_inner = r_inner;
  e.r = r_outer;
  e.validate();
  return e;
}

Region Region::unite(std::vector<Region> parts) {
  Region e;
  e.kind = Kind::unite;
  e.children = std::move(parts);
  e.validate();
  return e;
}

Region Region::difference(Region left, Region cut) {
  Region e;
  e.kind = Kind::difference;
  e.children.push_back(std::move(left));
  e.children.push_back(std::move(cut));
  e.validate();
  return e;
}

void Region::validate() const {
  switch (kind) {
    case Kind::disk:
      if (!(r > 0)) throw ConfigError("disk needs a positive radius");
      break;
    case Kind::segment:
      if (ax == bx && ay == by)
        throw ConfigError("segment endpoints coincide");
      break;
    case Kind::polygon:
      if (vertices.size() < 3)
        throw ConfigError("polygon needs at least three vertices");
      break;
    case Kind::annulus:
      if (!(r_inner >= 0) || !(r > r_inner))
        throw ConfigError("annulus needs 0 <= inner radius < outer radius");
      break;
    case Kind::unite:
      if (children.empty()) throw ConfigError("union of nothing");
      for (const Region& c : children) c.validate();
      break;
    case Kind::difference:
      if (children.size() != 2)
        throw ConfigError("difference takes exactly two regions");
      for (const Region& c : children) c.validate();
      break;
  }
}

double region_sdf(const Region& e, double x, double y) {
  switch (e.kind) {
    case Region::Kind::disk:
      return std::hypot(x - e.cx, y - e.cy) - e.r;
    case Region::Kind::segment:
      return seg_distance(x, y, e.ax, e.ay, e.bx, e.by);
    case Region::Kind::annulus: {
      double d = std::hypot(x - e.cx, y - e.cy);
      return std::max(e.r_inner - d, d - e.r);
    }
    case Region::Kind::polygon: {
      double d = kInf;
      size_t n = e.vertices.size();
      for (size_t i = 0, j = n - 1; i < n; j = i++) {
        d = std::min(d, seg_distance(x, y, e.vertices[j].first,
                                     e.vertices[j].second, e.vertices[i].first,
                                     e.vertices[i].second));
      }
      return polygon_interior(e.vertices, x, y) ? -d : d;
    }
    case Region::Kind::unite: {
      double d = kInf;
      for (const Region& c : e.children) d = std::min(d, region_sdf(c, x, y));
      return d;
    }
    case Region::Kind::difference:
      return std::max(region_sdf(e.children[0], x, y),
                      -region_sdf(e.children[1], x, y));
  }
  throw ConfigError("unknown region kind");
}

Box region_bbox(const Region& e) {
  switch (e.kind) {
    case Region::Kind::disk:
      return {e.cx - e.r, e.cy - e.r, e.cx + e.r, e.cy + e.r};
    case Region::Kind::annulus:
      return {e.cx - e.r, e.cy - e.r, e.cx + e.r, e.cy + e.r};
    case Region::Kind::segment:
      return {std::min(e.ax, e.bx), std::min(e.ay, e.by), std::max(e.ax, e.bx),
              std::max(e.ay, e.by)};
    case Region::Kind::polygon: {
      Box b{kInf, kInf, -kInf, -kInf};
      for (auto& v : e.vertices) {
        b.x0 = std::min(b.x0, v.first);
        b.y0 = std::min(b.y0, v.second);
        b.x1 = std::max(b.x1, v.first);
        b.y1 = std::max(b.y1, v.second);
      }
      return b;
    }
    case Region::Kind::unite: {
      Box b{kInf, kInf, -kInf, -kInf};
      for (const Region& c : e.children) {
        Box cb = region_bbox(c);
        b.x0 = std::min(b.x0, cb.x0);
        b.y0 = std::min(b.y0, cb.y0);
        b.x1 = std::max(b.x1, cb.x1);
        b.y1 = std::max(b.y1, cb.y1);
      }
      return b;
    }
    case Region::Kind::difference:
      return region_bbox(e.children[0]);
  }
  throw ConfigError("unknown region kind");
}

namespace {

using Cpx = std::complex<double>;

struct Curve {
  std::function<Cpx(double)> at;
  double t0 = 0, t1 = 1;
  bool periodic = false;
  double weight = 0;  // share of the candidate budget, by arclength
};

struct Cand {
  Cpx z;
  int curve = 0;
  double t = 0;
  double halfwin = 0;  // continuous-polish window radius in parameter
};

struct BoundarySet {
  std::vector<Curve> curves;
  std::vector<Cand> cands;
  double diam = 1;
};

void collect_curves(const Region& e, std::vector<Curve>& out) {
  switch (e.kind) {
    case Region::Kind::disk:
    case Region::Kind::annulus: {
      double cx = e.cx, cy = e.cy, r = e.r;
      out.push_back(Curve{[cx, cy, r](double t) {
                            return Cpx(cx + r * std::cos(t),
                                       cy + r * std::sin(t));
                          },
                          0, 2 * M_PI, true, 2 * M_PI * r});
      if (e.kind == Region::Kind::annulus && e.r_inner > 0) {
        double ri = e.r_inner;
        out.push_back(Curve{[cx, cy, ri](double t) {
                              return Cpx(cx + ri * std::cos(t),
                                         cy + ri * std::sin(t));
                            },
                            0, 2 * M_PI, true, 2 * M_PI * ri});
      }
      break;
    }
    case Region::Kind::segment: {
      Cpx a(e.ax, e.ay), b(e.bx, e.by);
      out.push_back(
          Curve{[a, b](double t) { return a + t * (b - a); }, 0, 1, false,
                std::abs(b - a)});
      break;
    }
    case Region::Kind::polygon: {
      size_t n = e.vertices.size();
      for (size_t i = 0; i < n; ++i) {
        Cpx a(e.vertices[i].first, e.vertices[i].second);
        Cpx b(e.vertices[(i + 1) % n].first, e.vertices[(i + 1) % n].second);
        out.push_back(
            Curve{[a, b](double t) { return a + t * (b - a); }, 0, 1, false,
                  std::abs(b - a)});
      }
      break;
    }
    case Region::Kind::unite:
    case Region::Kind::difference:
      for (const Region& c : e.children) collect_curves(c, out);
      break;
  }
}

BoundarySet build_boundary(const Region& e, int target) {
  e.validate();
  if (target < 64) throw ConfigError("boundary discretization too coarse");
  BoundarySet bs;
  collect_curves(e, bs.curves);
  Box box = region_bbox(e);
  bs.diam = std::hypot(box.width(), box.height());
  if (!(bs.diam > 0)) throw ConfigError("region has empty extent");
  double total = 0;
  for (const Curve& c : bs.curves) total += c.weight;
  double eps_keep = 1e-9 * bs.diam;
  for (size_t ci = 0; ci < bs.curves.size(); ++ci) {
    const Curve& c = bs.curves[ci];
    int m = std::max(8, int(std::lround(target * c.weight / total)));
    std::vector<double> ts(m);
    if (c.periodic) {
      for (int i = 0; i < m; ++i)
        ts[i] = c.t0 + (c.t1 - c.t0) * (i + 0.5) / m;
    } else {
      // Endpoint-clustered nodes: extremal configurations pile up at the
      // ends of flat pieces, uniform sampling starves them.
      for (int i = 0; i < m; ++i)
        ts[i] = c.t0 +
                (c.t1 - c.t0) * 0.5 * (1 - std::cos(M_PI * i / (m - 1)));
    }
    for (int i = 0; i < m; ++i) {
      Cpx z = c.at(ts[i]);
      if (std::abs(region_sdf(e, z.real(), z.imag())) > eps_keep) continue;
      double gap_lo, gap_hi;
      if (c.periodic) {
        gap_lo = ts[i] - ts[(i + m - 1) % m];
        if (gap_lo <= 0) gap_lo += c.t1 - c.t0;
        gap_hi = ts[(i + 1) % m] - ts[i];
        if (gap_hi <= 0) gap_hi += c.t1 - c.t0;
      } else {
        gap_lo = i > 0 ? ts[i] - ts[i - 1] : ts[1] - ts[0];
        gap_hi = i + 1 < m ? ts[i + 1] - ts[i] : ts[m - 1] - ts[m - 2];
      }
      bs.cands.push_back(
          Cand{z, int(ci), ts[i], 0.75 * std::max(gap_lo, gap_hi)});
    }
  }
  if (bs.cands.size() < 2)
    throw ConfigError("boundary discretization produced no usable points");
  return bs;
}

// Greedy Leja order over the candidate set, by running log-distance sums.
std::vector<int> leja_order(const BoundarySet& bs, int n) {
  int m = int(bs.cands.size());
  if (n > m)
    throw ConfigError("requested more points than boundary candidates");
  Cpx cen(0, 0);
  for (const Cand& c : bs.cands) cen += c.z;
  cen /= double(m);
  int first = 0;
  double best = -kInf;
  for (int i = 0; i < m; ++i) {
    double d = std::abs(bs.cands[i].z - cen);
    if (d > best) {
      best = d;
      first = i;
    }
  }
  std::vector<int> chosen{first};
  std::vector<char> used(m, 0);
  used[first] = 1;
  std::vector<double> s(m, 0.0);
  for (int i = 0; i < m; ++i)
    s[i] = std::log(std::abs(bs.cands[i].z - bs.cands[first].z));
  while (int(chosen.size()) < n) {
    int pick = -1;
    double bv = -kInf;
    for (int i = 0; i < m; ++i) {
      if (used[i]) continue;
      if (s[i] > bv) {
        bv = s[i];
        pick = i;
      }
    }
    if (pick < 0) throw NumericalFailure("Leja selection exhausted");
    used[pick] = 1;
    chosen.push_back(pick);
    for (int i = 0; i < m; ++i)
      s[i] += std::log(std::abs(bs.cands[i].z - bs.cands[pick].z));
  }
  return chosen;
}

double log_product_over_pairs(const std::vector<Cpx>& z) {
  double acc = 0;
  for (size_t i = 0; i < z.size(); ++i)
    for (size_t j = i + 1; j < z.size(); ++j)
      acc += std::log(std::abs(z[i] - z[j]));
  return acc;
}

struct AscentResult {
  std::vector<Cpx> points;
  bool converged = false;
  int sweeps = 0;
};

AscentResult ascend(const BoundarySet& bs, std::vector<int> idx,
                    const CapacityControl& ctl) {
  int m = int(bs.cands.size());
  int n = int(idx.size());
  std::vector<char> used(m, 0);
  for (int i : idx) used[i] = 1;
  std::vector<double> s(m);
  auto rebuild = [&] {
    for (int c = 0; c < m; ++c) {
      double acc = 0;
      for (int j : idx) acc += std::log(std::abs(bs.cands[c].z - bs.cands[j].z));
      s[c] = acc;
    }
  };
  bool converged = false;
  int sweeps = 0;
  for (; sweeps < ctl.max_sweeps; ++sweeps) {
    rebuild();
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      int cur = idx[i];
      Cpx zi = bs.cands[cur].z;
      double val_cur = 0;
      for (int j : idx)
        if (j != cur) val_cur += std::log(std::abs(zi - bs.cands[j].z));
      int bestc = cur;
      double bestv = val_cur;
      for (int c = 0; c < m; ++c) {
        if (used[c]) continue;
        double v = s[c] - std::log(std::abs(bs.cands[c].z - zi));
        if (v > bestv) {
          bestv = v;
          bestc = c;
        }
      }
      if (bestc != cur && bestv > val_cur + 1e-13 * (1 + std::abs(val_cur))) {
        used[cur] = 0;
        used[bestc] = 1;
        idx[i] = bestc;
        Cpx zn = bs.cands[bestc].z;
        for (int c = 0; c < m; ++c) {
          if (c == cur) {
            double acc = 0;
            for (int j : idx)
              acc += std::log(std::abs(bs.cands[c].z - bs.cands[j].z));
            s[c] = acc;
          } else if (c == bestc) {
            s[c] = -kInf;
          } else {
            s[c] += std::log(std::abs(bs.cands[c].z - zn)) -
                    std::log(std::abs(bs.cands[c].z - zi));
          }
        }
        moved = true;
      }
    }
    if (!moved) {
      converged = true;
      ++sweeps;
      break;
    }
  }

  AscentResult out;
  out.sweeps = sweeps;
  out.converged = converged;
  out.points.reserve(n);
  for (int i : idx) out.points.push_back(bs.cands[i].z);

  // Continuous polish: slide each point along its boundary curve by golden
  // section inside its discretization window.  Points cannot leave their
  // curve; sliding onto a clipped stretch of a composite boundary is undone
  // afterwards by clamp_to_region.
  struct Pos {
    int curve;
    double t;
  };
  std::vector<Pos> pos(n);
  for (int i = 0; i < n; ++i)
    pos[i] = Pos{bs.cands[idx[i]].curve, bs.cands[idx[i]].t};
  const double gr = (std::sqrt(5.0) - 1) / 2;
  for (int round = 0; round < ctl.refine_rounds; ++round) {
    for (int i = 0; i < n; ++i) {
      const Curve& cv = bs.curves[pos[i].curve];
      double halfwin = bs.cands[idx[i]].halfwin;
      double lo = pos[i].t - halfwin, hi = pos[i].t + halfwin;
      if (!cv.periodic) {
        lo = std::max(lo, cv.t0);
        hi = std::min(hi, cv.t1);
      }
      auto score = [&](double t) {
        Cpx z = cv.at(t);
        double acc = 0;
        for (int j = 0; j < n; ++j)
          if (j != i) acc += std::log(std::abs(z - out.points[j]));
        return acc;
      };
      double a = lo, b = hi;
      double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
      double f1 = score(c1), f2 = score(c2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          a = c1;
          c1 = c2;
          f1 = f2;
          c2 = a + gr * (b - a);
          f2 = score(c2);
        } else {
          b = c2;
          c2 = c1;
          f2 = f1;
          c1 = b - gr * (b - a);
          f1 = score(c1);
        }
      }
      double tbest = (a + b) / 2;
      double cur = score(pos[i].t);
      if (score(tbest) > cur) {
        pos[i].t = tbest;
        out.points[i] = cv.at(tbest);
      }
    }
  }
  return out;
}

// Drop polished points that slid off composite regions.  Only unions and
// differences can clip curves; primitives keep every curve point feasible.
void clamp_to_region(const Region& e, const BoundarySet& bs,
                     AscentResult& res, const std::vector<int>& idx) {
  double eps = 1e-7 * bs.diam;
  for (size_t i = 0; i < res.points.size(); ++i) {
    Cpx z = res.points[i];
    if (std::abs(region_sdf(e, z.real(), z.imag())) > eps)
      res.points[i] = bs.cands[idx[i]].z;
  }
}

struct FitResult {
  double a = 0, c = 0, d = 0;
  bool ok = false;
};

// Least squares for ln delta_n = a + c ln n/(n-1) + d/n over the given n's.
FitResult fit_tail(const std::vector<int>& ns, const std::vector<double>& y) {
  size_t m = ns.size();
  if (m < 3) return {};
  double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double rhs[3] = {0, 0, 0};
  for (size_t i = 0; i < m; ++i) {
    double n = ns[i];
    double g[3] = {1.0, std::log(n) / (n - 1), 1.0 / n};
    for (int p = 0; p < 3; ++p) {
      rhs[p] += g[p] * y[i];
      for (int q = 0; q < 3; ++q) A[p][q] += g[p] * g[q];
    }
  }
  // Gaussian elimination with partial pivoting on the 3x3 normal system.
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int rw = col + 1; rw < 3; ++rw)
      if (std::abs(A[perm[rw]][col]) > std::abs(A[perm[piv]][col])) piv = rw;
    std::swap(perm[col], perm[piv]);
    double d = A[perm[col]][col];
    if (d == 0) return {};
    for (int rw = col + 1; rw < 3; ++rw) {
      double f = A[perm[rw]][col] / d;
      for (int cc = col; cc < 3; ++cc) A[perm[rw]][cc] -= f * A[perm[col]][cc];
      rhs[perm[rw]] -= f * rhs[perm[col]];
    }
  }
  double x[3];
  for (int col = 2; col >= 0; --col) {
    double acc = rhs[perm[col]];
    for (int cc = col + 1; cc < 3; ++cc) acc -= A[perm[col]][cc] * x[cc];
    x[col] = acc / A[perm[col]][col];
  }
  return {x[0], x[1], x[2], true};
}

}  // namespace

std::vector<std::complex<double>> leja_points(const Region& e, int n,
                                              const CapacityControl& ctl) {
  if (n < 1) throw ConfigError("need at least one point");
  BoundarySet bs = build_boundary(e, ctl.boundary_target);
  std::vector<int> order = leja_order(bs, n);
  std::vector<Cpx> out;
  out.reserve(n);
  for (int i : order) out.push_back(bs.cands[i].z);
  return out;
}

DiameterResult transfinite_diameter(const Region& e, int n,
                                    const CapacityControl& ctl) {
  if (n < 2) throw ConfigError("transfinite diameter needs n >= 2");
  BoundarySet bs = build_boundary(e, ctl.boundary_target);
  std::vector<int> seed = leja_order(bs, n);
  AscentResult res = ascend(bs, seed, ctl);
  clamp_to_region(e, bs, res, seed);
  double lp = log_product_over_pairs(res.points);
  DiameterResult out;
  out.value = std::exp(2 * lp / (double(n) * (n - 1)));
  out.converged = res.converged;
  out.sweeps = res.sweeps;
  return out;
}

double chebyshev_bound_with_roots(
    const Region& e, const std::vector<std::complex<double>>& roots,
    const CapacityControl& ctl) {
  if (roots.empty()) throw ConfigError("monic polynomial needs degree >= 1");
  BoundarySet bs = build_boundary(e, ctl.boundary_target);
  double best = -kInf;
  for (const Cand& c : bs.cands) {
    double acc = 0;
    for (const Cpx& r : roots) acc += std::log(std::abs(c.z - r));
    best = std::max(best, acc);
  }
  return std::exp(best / double(roots.size()));
}

double chebyshev_bound(const Region& e, int n, const CapacityControl& ctl) {
  if (n < 1) throw ConfigError("monic polynomial needs degree >= 1");
  return chebyshev_bound_with_roots(e, leja_points(e, n, ctl), ctl);
}

CapacityEstimate capacity_estimate(const Region& e, int n_max,
                                   const CapacityControl& ctl) {
  if (n_max < 2) throw ConfigError("capacity estimate needs n_max >= 2");
  BoundarySet bs = build_boundary(e, ctl.boundary_target);
  std::vector<int> leja = leja_order(bs, n_max);

  CapacityEstimate est;
  est.n_max = n_max;
  est.converged = true;

  // Upper sequence: running log-sums of |z - root| over the candidates give
  // every Leja-prefix bound in one pass.
  std::vector<double> logsum(bs.cands.size(), 0.0);
  for (int n = 1; n <= n_max; ++n) {
    Cpx root = bs.cands[leja[n - 1]].z;
    double best = -kInf;
    for (size_t c = 0; c < logsum.size(); ++c) {
      logsum[c] += std::log(std::abs(bs.cands[c].z - root));
      best = std::max(best, logsum[c]);
    }
    est.upper_seq.push_back(std::exp(best / n));
  }

  for (int n = 2; n <= n_max; ++n) {
    std::vector<int> seed(leja.begin(), leja.begin() + n);
    AscentResult res = ascend(bs, seed, ctl);
    clamp_to_region(e, bs, res, seed);
    double lp = log_product_over_pairs(res.points);
    est.lower_seq.push_back(std::exp(2 * lp / (double(n) * (n - 1))));
    est.converged = est.converged && res.converged;
  }

  int have = int(est.lower_seq.size());
  int tail = std::max(3, (have + 2) / 3);
  tail = std::min(tail, have);
  std::vector<int> ns;
  std::vector<double> ys;
  for (int i = have - tail; i < have; ++i) {
    ns.push_back(i + 2);
    ys.push_back(std::log(est.lower_seq[i]));
  }
  FitResult fit = fit_tail(ns, ys);
  est.extrapolated = fit.ok ? std::exp(fit.a) : est.lower_seq.back();
  return est;
}

Real monic_l2_minimum(const Profile& w, int k, unsigned bits) {
  if (k < 0) throw ConfigError("monic minimum needs k >= 0");
  int sign = profile_definite_sign(w);
  if (sign < 0) throw ConfigError("weight must be nonnegative");
  if (sign == 0)
    throw ConfigError(
        "weight must declare a definite nonnegative sign; mixed-sign "
        "profiles have no monic minimum");
  PrecisionGuard guard(bits ? bits : precision_bits());

  if (const auto* step = std::get_if<RadialStep>(&w)) {
    // Radial weight: monomials are orthogonal, M_k is the single moment
    // 2 pi int r^{2k+1} w(r) dr, exact per annulus.
    Real acc(0);
    for (const auto& a : step->annuli) {
      Real hi = pow(a.r_hi, 2 * k + 2), lo = pow(a.r_lo, 2 * k + 2);
      acc += a.value * (hi - lo) / (2 * k + 2);
    }
    Real m = 2 * pi_value() * acc;
    if (!(m > 0))
      throw HypothesisFailure("weight vanishes: Gram matrix is singular");
    return m;
  }
  if (const auto* sm = std::get_if<SmoothRadial>(&w)) {
    auto f = [sm, k](const Real& r) { return pow(r, 2 * k + 1) * sm->eval(r); };
    Real rel = numeric_zero_cutoff() / 1024;
    Real bound = profile_max_abs(w) * pow(sm->support_radius, 2 * k + 2);
    QuadResult q = integrate_adaptive(f, Real(0), sm->support_radius, rel,
                                      rel * (bound + 1));
    Real m = 2 * pi_value() * q.value;
    if (!(m > 0))
      throw HypothesisFailure("weight vanishes: Gram matrix is singular");
    return m;
  }

  const Grid2D& g = std::get<Grid2D>(w);
  int dim = k + 1;
  std::vector<Complex> gram(size_t(dim) * dim, Complex());
  Real da = g.hx * g.hy;
  std::vector<Complex> pw(dim);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const Real& wv = g.values[size_t(ix) + size_t(g.nx) * iy];
      if (wv == 0) continue;
      Real x = g.x0 + g.hx * (ix + Real(1) / 2);
      Real y = g.y0 + g.hy * (iy + Real(1) / 2);
      Complex z(x, y);
      pw[0] = Complex(Real(1));
      for (int j = 1; j < dim; ++j) pw[j] = pw[j - 1] * z;
      Real wda = wv * da;
      for (int j = 0; j < dim; ++j)
        for (int l = j; l < dim; ++l)
          gram[size_t(j) * dim + l] += conj(pw[j]) * pw[l] * wda;
    }
  }
  for (int j = 0; j < dim; ++j)
    for (int l = 0; l < j; ++l)
      gram[size_t(j) * dim + l] = conj(gram[size_t(l) * dim + j]);

  // Cholesky G = L L*; M_k is the last squared pivot, i.e. the determinant
  // ratio det G_{k+1} / det G_k.
  std::vector<Complex> L(size_t(dim) * dim, Complex());
  Real last(0);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      Complex acc = gram[size_t(i) * dim + j];
      for (int p = 0; p < j; ++p)
        acc -= L[size_t(i) * dim + p] * conj(L[size_t(j) * dim + p]);
      if (j < i) {
        L[size_t(i) * dim + j] = acc / L[size_t(j) * dim + j];
      } else {
        // Exact rank deficiency shows up as a pivot on rounding scale, not
        // exactly zero; measure it against the untouched diagonal entry.
        if (!(acc.re > numeric_zero_cutoff() * gram[size_t(i) * dim + i].re))
          throw HypothesisFailure(
              "Gram matrix is numerically singular at order " +
              std::to_string(i) +
              "; the weight is effectively supported on too few points");
        last = acc.re;
        L[size_t(i) * dim + j] = Complex(sqrt(acc.re));
      }
    }
  }
  return last;
}

double asym_constant(double cap, double b) {
  if (!(cap > 0)) throw ConfigError("capacity must be positive");
  if (!(b > 0)) throw ConfigError("field strength must be positive");
  return 1 + std::log(b / 2 * cap * cap);
}

double asym_constant(const Region& support, double b, int side,
                     bool sandwiched, int n_max, const CapacityControl& ctl) {
  if (side != 1 && side != -1) throw ConfigError("side must be +1 or -1");
  if (side < 0 && !sandwiched)
    throw ConfigError(
        "the lower constant is computed only for potentials sandwiched "
        "between multiples of their support indicator");
  return asym_constant(capacity_estimate(support, n_max, ctl).extrapolated, b);
}

std::string to_string(Encircle v) {
  switch (v) {
    case Encircle::encircled:
      return "encircled";
    case Encircle::not_encircled:
      return "not_encircled";
    case Encircle::unresolved:
      return "unresolved";
  }
  return "unresolved";
}

Encircle encircles(const Region& omega, const Region& k, int resolution) {
  omega.validate();
  k.validate();
  if (resolution < 16) throw ConfigError("resolution too small");

  Box bo = region_bbox(omega), bk = region_bbox(k);
  Box box{std::min(bo.x0, bk.x0), std::min(bo.y0, bk.y0),
          std::max(bo.x1, bk.x1), std::max(bo.y1, bk.y1)};
  double cell = std::max(box.width(), box.height()) / resolution;
  if (!(cell > 0)) throw ConfigError("degenerate bounding box");
  box.x0 -= 3 * cell;
  box.y0 -= 3 * cell;
  box.x1 += 3 * cell;
  box.y1 += 3 * cell;
  int nx = int(std::ceil(box.width() / cell));
  int ny = int(std::ceil(box.height() / cell));
  double half_diag = 0.5 * std::hypot(cell, cell);

  auto at = [nx](int ix, int iy) { return size_t(ix) + size_t(nx) * iy; };
  std::vector<uint8_t> in_omega(size_t(nx) * ny, 0), in_k(size_t(nx) * ny, 0);
  for (int iy = 0; iy < ny; ++iy) {
    double y = box.y0 + cell * (iy + 0.5);
    for (int ix = 0; ix < nx; ++ix) {
      double x = box.x0 + cell * (ix + 0.5);
      if (region_sdf(omega, x, y) <= 0) in_omega[at(ix, iy)] = 1;
      if (region_sdf(k, x, y) <= half_diag) in_k[at(ix, iy)] = 1;
    }
  }

  // Flood-fill the complement from the frame: the unbounded component.
  std::vector<uint8_t> unbounded(size_t(nx) * ny, 0);
  std::deque<std::pair<int, int>> queue;
  auto push = [&](int ix, int iy) {
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return;
    size_t p = at(ix, iy);
    if (in_omega[p] || unbounded[p]) return;
    unbounded[p] = 1;
    queue.emplace_back(ix, iy);
  };
  for (int ix = 0; ix < nx; ++ix) {
    push(ix, 0);
    push(ix, ny - 1);
  }
  for (int iy = 0; iy < ny; ++iy) {
    push(0, iy);
    push(nx - 1, iy);
  }
  while (!queue.empty()) {
    auto [ix, iy] = queue.front();
    queue.pop_front();
    push(ix + 1, iy);
    push(ix - 1, iy);
    push(ix, iy + 1);
    push(ix, iy - 1);
  }

  bool have_k = false;
  for (int iy = 0; iy < ny && true; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      size_t p = at(ix, iy);
      if (!in_k[p]) continue;
      have_k = true;
      if (unbounded[p]) return Encircle::not_encircled;
    }
  }
  if (!have_k) return Encircle::unresolved;

  // K must stay off the closure of the unbounded component.
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (!in_k[at(ix, iy)]) continue;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
          if (unbounded[at(jx, jy)]) return Encircle::unresolved;
        }
      }
    }
  }

  // Wall thickness between the bounded and unbounded complement parts:
  // Chebyshev-metric BFS from the unbounded component across everything.
  std::vector<int> dist(size_t(nx) * ny, -1);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      if (unbounded[at(ix, iy)]) {
        dist[at(ix, iy)] = 0;
        queue.emplace_back(ix, iy);
      }
  while (!queue.empty()) {
    auto [ix, iy] = queue.front();
    queue.pop_front();
    int d = dist[at(ix, iy)];
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        int jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
        size_t p = at(jx, jy);
        if (dist[p] < 0) {
          dist[p] = d + 1;
          queue.emplace_back(jx, jy);
        }
      }
    }
  }
  int margin = std::numeric_limits<int>::max();
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      size_t p = at(ix, iy);
      if (!in_omega[p] && !unbounded[p] && dist[p] >= 0)
        margin = std::min(margin, dist[p]);
    }
  if (margin <= 2) return Encircle::unresolved;
  return Encircle::encircled;
}

}  // namespace ldk
