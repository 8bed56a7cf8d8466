// SPDX-License-Identifier: Apache-2.0

#include "ldk/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace ldk {

RadialStep RadialStep::disk(const Real& radius, const Real& value) {
  if (!(radius > 0)) throw ConfigError("disk radius must be positive");
  RadialStep s;
  s.annuli.push_back(Annulus{Real(0), radius, value});
  return s;
}

RadialStep RadialStep::make(std::vector<Annulus> as) {
  std::sort(as.begin(), as.end(),
            [](const Annulus& a, const Annulus& b) { return a.r_lo < b.r_lo; });
  std::vector<Annulus> kept;
  for (auto& a : as) {
    if (a.r_lo < 0 || !(a.r_hi > a.r_lo))
      throw ConfigError("annulus radii must satisfy 0 <= r_lo < r_hi");
    if (!kept.empty() && a.r_lo < kept.back().r_hi)
      throw ConfigError("annuli must be pairwise disjoint");
    if (a.value != 0) kept.push_back(std::move(a));
  }
  RadialStep s;
  s.annuli = std::move(kept);
  return s;
}

Real RadialStep::support_radius() const {
  return annuli.empty() ? Real(0) : annuli.back().r_hi;
}

Real RadialStep::eval(const Real& r) const {
  // Half-open cells [r_lo, r_hi); the boundary convention has measure zero.
  for (const auto& a : annuli)
    if (r >= a.r_lo && r < a.r_hi) return a.value;
  return Real(0);
}

Real RadialStep::max_abs() const {
  Real m(0);
  for (const auto& a : annuli) m = std::max(m, abs(a.value));
  return m;
}

int RadialStep::definite_sign() const {
  bool pos = true, neg = true;
  for (const auto& a : annuli) {
    if (a.value < 0) pos = false;
    if (a.value > 0) neg = false;
  }
  if (pos) return 1;
  if (neg) return -1;
  return 0;
}

Grid2D Grid2D::sample(const Real& x0, const Real& y0, const Real& width,
                      const Real& height, int nx, int ny,
                      const std::function<Real(const Real&, const Real&)>& f) {
  if (nx < 1 || ny < 1 || !(width > 0) || !(height > 0))
    throw ConfigError("grid needs positive extent and at least one cell");
  Grid2D g;
  g.x0 = x0;
  g.y0 = y0;
  g.nx = nx;
  g.ny = ny;
  g.hx = width / nx;
  g.hy = height / ny;
  g.values.resize(static_cast<size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    Real y = y0 + (Real(iy) + Real(1) / 2) * g.hy;
    for (int ix = 0; ix < nx; ++ix) {
      Real x = x0 + (Real(ix) + Real(1) / 2) * g.hx;
      g.values[static_cast<size_t>(ix) + static_cast<size_t>(nx) * iy] =
          f(x, y);
    }
  }
  return g;
}

Real Grid2D::eval(const Real& x, const Real& y) const {
  if (nx < 1 || ny < 1) return Real(0);
  if (x < x0 || y < y0 || x > x0 + hx * nx || y > y0 + hy * ny) return Real(0);
  auto locate = [](const Real& t, const Real& t0, const Real& h, int n,
                   int& i0, Real& frac) {
    if (n == 1) {
      i0 = 0;
      frac = 0;
      return;
    }
    Real fi = (t - t0) / h - Real(1) / 2;
    Real fl = floor(fi);
    i0 = static_cast<int>(fl);
    frac = fi - fl;
    if (i0 < 0) {
      i0 = 0;
      frac = 0;
    } else if (i0 >= n - 1) {
      i0 = n - 2;
      frac = 1;
    }
  };
  int ix, iy;
  Real tx, ty;
  locate(x, x0, hx, nx, ix, tx);
  locate(y, y0, hy, ny, iy, ty);
  auto at = [&](int i, int j) -> const Real& {
    return values[static_cast<size_t>(i) + static_cast<size_t>(nx) * j];
  };
  int ix1 = (nx == 1) ? ix : ix + 1;
  int iy1 = (ny == 1) ? iy : iy + 1;
  Real lo = at(ix, iy) * (1 - tx) + at(ix1, iy) * tx;
  Real hi = at(ix, iy1) * (1 - tx) + at(ix1, iy1) * tx;
  return lo * (1 - ty) + hi * ty;
}

Real Grid2D::support_radius() const {
  Real X = std::max(abs(x0), abs(x0 + hx * nx));
  Real Y = std::max(abs(y0), abs(y0 + hy * ny));
  return sqrt(X * X + Y * Y);
}

Real Grid2D::max_abs() const {
  Real m(0);
  for (const auto& v : values) m = std::max(m, abs(v));
  return m;
}

bool is_radial(const Profile& p) {
  return !std::holds_alternative<Grid2D>(p);
}

Real profile_support_radius(const Profile& p) {
  if (const auto* f = std::get_if<SmoothRadial>(&p)) return f->support_radius;
  if (const auto* s = std::get_if<RadialStep>(&p)) return s->support_radius();
  return std::get<Grid2D>(p).support_radius();
}

Real profile_eval_radial(const Profile& p, const Real& r) {
  if (const auto* s = std::get_if<RadialStep>(&p)) return s->eval(r);
  if (const auto* f = std::get_if<SmoothRadial>(&p)) return f->eval(r);
  throw ConfigError("profile is not radial");
}

Real profile_eval(const Profile& p, const Real& x, const Real& y) {
  if (const auto* g = std::get_if<Grid2D>(&p)) return g->eval(x, y);
  return profile_eval_radial(p, sqrt(x * x + y * y));
}

Real profile_max_abs(const Profile& p) {
  if (const auto* s = std::get_if<RadialStep>(&p)) return s->max_abs();
  if (const auto* g = std::get_if<Grid2D>(&p)) return g->max_abs();
  // Scan for smooth profiles; their support is compact by construction.
  const auto& f = std::get<SmoothRadial>(p);
  Real m(0), R = f.support_radius;
  const int n = 4096;
  for (int i = 0; i <= n; ++i) m = std::max(m, abs(f.eval(R * i / n)));
  return m;
}

int profile_definite_sign(const Profile& p) {
  if (const auto* s = std::get_if<RadialStep>(&p)) return s->definite_sign();
  if (const auto* f = std::get_if<SmoothRadial>(&p)) return f->definite_sign;
  const auto& g = std::get<Grid2D>(p);
  bool pos = true, neg = true;
  for (const auto& v : g.values) {
    if (v < 0) pos = false;
    if (v > 0) neg = false;
  }
  if (pos) return 1;
  if (neg) return -1;
  return 0;
}

int laplacian_order_available(const Profile& p) {
  if (std::holds_alternative<RadialStep>(p)) return 0;
  if (const auto* f = std::get_if<SmoothRadial>(&p))
    return static_cast<int>(f->laplacians.size());
  return 2;  // grids serve iterated 5-point stencils
}

Real profile_laplacian_radial(const Profile& p, int order, const Real& r) {
  if (order == 0) return profile_eval_radial(p, r);
  const auto* f = std::get_if<SmoothRadial>(&p);
  if (!f || order > static_cast<int>(f->laplacians.size()))
    throw ConfigError("profile has no Laplacian oracle of the requested order");
  return f->laplacians[order - 1](r);
}

namespace {

// 5-point stencil with one Richardson step: h and h/2 estimates combine to
// fourth order.
Real stencil_laplacian(const std::function<Real(const Real&, const Real&)>& f,
                       const Real& x, const Real& y, const Real& h) {
  auto lap_h = [&](const Real& s) {
    return (f(x + s, y) + f(x - s, y) + f(x, y + s) + f(x, y - s) -
            4 * f(x, y)) /
           (s * s);
  };
  Real coarse = lap_h(h);
  Real fine = lap_h(h / 2);
  return (4 * fine - coarse) / 3;
}

}  // namespace

Real profile_laplacian(const Profile& p, int order, const Real& x,
                       const Real& y) {
  if (order == 0) return profile_eval(p, x, y);
  if (is_radial(p))
    return profile_laplacian_radial(p, order, sqrt(x * x + y * y));
  const auto& g = std::get<Grid2D>(p);
  if (order > 2)
    throw ConfigError("grid profiles serve Laplacian orders 0..2 only");
  // The stencil step stays a fixed multiple of the pitch: below the pitch a
  // bilinear interpolant has no curvature to measure.
  Real h = 4 * std::max(g.hx, g.hy);
  auto ev = [&g](const Real& u, const Real& v) { return g.eval(u, v); };
  if (order == 1) return stencil_laplacian(ev, x, y, h);
  auto lap1 = [&](const Real& u, const Real& v) {
    return stencil_laplacian(ev, u, v, h);
  };
  return stencil_laplacian(lap1, x, y, 4 * h);
}

Profile abs_bracket(const Profile& p, const Real& eps, int s) {
  if (s != 1 && s != -1) throw ConfigError("bracket side must be +1 or -1");
  if (!(eps >= 0)) throw ConfigError("bracket eps must be nonnegative");
  Real se = Real(s) * eps;
  if (const auto* st = std::get_if<RadialStep>(&p)) {
    RadialStep out = *st;
    for (auto& a : out.annuli) a.value += se * abs(a.value);
    return out;
  }
  if (const auto* g = std::get_if<Grid2D>(&p)) {
    Grid2D out = *g;
    for (auto& v : out.values) v += se * abs(v);
    return out;
  }
  const auto& f = std::get<SmoothRadial>(p);
  SmoothRadial out;
  out.support_radius = f.support_radius;
  out.built_bits = f.built_bits;
  out.descriptor = f.descriptor + (s > 0 ? "+|.|eps" : "-|.|eps");
  if (f.definite_sign != 0) {
    // f + s*eps*|f| = (1 + s*eps*sign(f)) * f: a scalar multiple, so every
    // derivative oracle survives.
    Real scale = 1 + se * f.definite_sign;
    out.smoothness = f.smoothness;
    out.definite_sign = (scale >= 0) ? f.definite_sign : -f.definite_sign;
    auto base_eval = f.eval;
    out.eval = [base_eval, scale](const Real& r) { return scale * base_eval(r); };
    for (const auto& lap : f.laplacians)
      out.laplacians.push_back(
          [lap, scale](const Real& r) { return scale * lap(r); });
    if (f.ddr) {
      auto base_ddr = f.ddr;
      out.ddr = [base_ddr, scale](const Real& r) { return scale * base_ddr(r); };
    }
    return out;
  }
  // Mixed sign: |f| breaks smoothness at the zero set.
  out.smoothness = 0;
  out.definite_sign = 0;
  auto base_eval = f.eval;
  out.eval = [base_eval, se](const Real& r) {
    Real v = base_eval(r);
    return v + se * abs(v);
  };
  return out;
}

// ---- quadrature ----

namespace {

// Legendre value and derivative by the three-term recurrence.
void legendre_pair(int n, const Real& x, Real& pn, Real& dpn) {
  Real pm1(1), p(x);
  for (int k = 1; k < n; ++k) {
    Real pp1 = ((2 * k + 1) * x * p - k * pm1) / (k + 1);
    pm1 = p;
    p = pp1;
  }
  pn = p;
  dpn = n * (x * p - pm1) / (x * x - 1);
}

std::vector<std::pair<Real, Real>> build_gl_rule(int n) {
  std::vector<std::pair<Real, Real>> rule(n);
  Real eps = ldexp(Real(1), -static_cast<int>(precision_bits()) + 4);
  for (int i = 1; i <= (n + 1) / 2; ++i) {
    Real x(std::cos(M_PI * (i - 0.25) / (n + 0.5)));
    Real pn, dpn;
    for (int it = 0; it < 64; ++it) {
      legendre_pair(n, x, pn, dpn);
      Real dx = pn / dpn;
      x -= dx;
      if (abs(dx) <= eps * abs(x) + eps) break;
    }
    legendre_pair(n, x, pn, dpn);
    Real w = 2 / ((1 - x * x) * dpn * dpn);
    rule[i - 1] = {x, w};
    rule[n - i] = {-x, w};
  }
  if (n % 2 == 1) rule[n / 2].first = 0;  // center node is exact
  return rule;
}

std::mutex g_rule_mutex;
std::map<std::pair<int, unsigned>,
         std::unique_ptr<const std::vector<std::pair<Real, Real>>>>
    g_rules;

Real gl_panel(const std::function<Real(const Real&)>& f,
              const std::vector<std::pair<Real, Real>>& rule, const Real& a,
              const Real& b) {
  Real mid = (a + b) / 2, half = (b - a) / 2;
  Real acc(0);
  for (const auto& [x, w] : rule) acc += w * f(mid + half * x);
  return half * acc;
}

struct PanelCtx {
  const std::function<Real(const Real&)>* f;
  const std::vector<std::pair<Real, Real>>* rule;
  Real rel_tol;
  Real abs_floor_per_len;  // absolute floor prorated by panel length
};

void refine_panel(const PanelCtx& ctx, const Real& a, const Real& b,
                  const Real& coarse, int depth, QuadResult& out) {
  Real mid = (a + b) / 2;
  Real left = gl_panel(*ctx.f, *ctx.rule, a, mid);
  Real right = gl_panel(*ctx.f, *ctx.rule, mid, b);
  Real refined = left + right;
  if (!boost::multiprecision::isfinite(refined))
    throw NumericalFailure("integrand produced a non-finite value");
  Real err = abs(refined - coarse);
  Real floor_here = ctx.abs_floor_per_len * (b - a);
  if (err <= floor_here || err <= ctx.rel_tol * abs(refined)) {
    out.value += refined;
    out.err_est += err;
    return;
  }
  if (depth <= 0)
    throw NumericalFailure("adaptive quadrature exceeded depth limit");
  refine_panel(ctx, a, mid, left, depth - 1, out);
  refine_panel(ctx, mid, b, right, depth - 1, out);
}

}  // namespace

const std::vector<std::pair<Real, Real>>& gl_rule(int npts) {
  if (npts < 2 || npts > 512) throw ConfigError("gl_rule order out of range");
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  auto key = std::make_pair(npts, precision_bits());
  auto it = g_rules.find(key);
  if (it == g_rules.end()) {
    auto built = std::make_unique<const std::vector<std::pair<Real, Real>>>(
        build_gl_rule(npts));
    it = g_rules.emplace(key, std::move(built)).first;
  }
  return *it->second;
}

QuadResult integrate_adaptive(const std::function<Real(const Real&)>& f,
                              const Real& a, const Real& b,
                              const Real& rel_tol, const Real& abs_floor,
                              int max_depth) {
  if (!(b > a)) {
    if (b == a) return QuadResult{Real(0), Real(0)};
    throw ConfigError("integration bounds out of order");
  }
  // Panel order grows with precision so the bisection depth stays shallow.
  unsigned bits = precision_bits();
  int order = bits <= 192 ? 24 : std::min(256, static_cast<int>(bits / 8));
  const auto& rule = gl_rule(order);
  PanelCtx ctx{&f, &rule, rel_tol, abs_floor / (b - a)};
  QuadResult out{Real(0), Real(0)};
  Real coarse = gl_panel(f, rule, a, b);
  refine_panel(ctx, a, b, coarse, max_depth, out);
  return out;
}

}  // namespace ldk
