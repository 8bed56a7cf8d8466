// SPDX-License-Identifier: Apache-2.0

#include "ldk/effective.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <mutex>

namespace ldk {

namespace {

using boost::multiprecision::cpp_int;

cpp_int binomial_int(int n, int k) {
  if (k < 0 || k > n) return 0;
  cpp_int acc = 1;
  for (int i = 0; i < k; ++i) {
    acc *= n - i;
    acc /= i + 1;  // exact: product of i+1 consecutive integers
  }
  return acc;
}

Real rational_to_real(const Rational& r) {
  return Real(boost::multiprecision::numerator(r).str()) /
         Real(boost::multiprecision::denominator(r).str());
}

int profile_lap_avail(const Profile& p) { return laplacian_order_available(p); }

// L_q^{(m)}(-Lap/(2b)) f at a point: every substituted coefficient is
// positive, so the sum is cancellation-free in the weights.
Real apply_laguerre_laplacian(const Profile& f, const LaguerrePoly& L,
                              const Real& b, const Real& x, const Real& y) {
  Real acc(0);
  Real scale(1);  // (2b)^{-j}
  for (size_t j = 0; j < L.coeffs.size(); ++j) {
    Rational c = L.coeffs[j];
    if (j % 2 == 1) c = -c;  // unsign: coeff * (-1)^j = binom/j! > 0
    if (j > 0) scale /= 2 * b;
    acc += rational_to_real(c) * scale *
           profile_laplacian(f, static_cast<int>(j), x, y);
  }
  return acc;
}

}  // namespace

Real LaguerrePoly::eval(const Real& t) const {
  Real acc(0);
  for (size_t j = coeffs.size(); j-- > 0;)
    acc = acc * t + rational_to_real(coeffs[j]);
  return acc;
}

LaguerrePoly laguerre(int q, int m) {
  if (q < 0 || m < 0) throw ConfigError("laguerre indices must be nonnegative");
  LaguerrePoly L;
  L.q = q;
  L.m = m;
  L.coeffs.resize(q + 1);
  Rational fact = 1;
  for (int j = 0; j <= q; ++j) {
    if (j > 0) fact *= j;
    Rational c(binomial_int(q + m, q - j));
    c /= fact;
    if (j % 2 == 1) c = -c;
    L.coeffs[j] = c;
  }
  return L;
}

Real field_curl(const ComplexField& w, const Real& x, const Real& y) {
  if (!w.d1 || !w.d2)
    throw ConfigError("field curl needs both first derivatives of the field");
  return w.d2(x, y).re - w.d1(x, y).im;
}

EffectiveSymbol effective_symbol(int q, const PotentialSpec& V,
                                 const MagneticParams& p) {
  p.validate();
  EffectiveSymbol out;
  out.descriptor = "effective symbol q=" + std::to_string(q);

  if (q == 0) {
    // The bottom level projects onto the first component alone.
    Profile v1 = V.v1;
    out.eval = [v1](const Real& x, const Real& y) {
      return profile_eval(v1, x, y);
    };
    out.radial = is_radial(v1);
    out.support_radius = profile_support_radius(v1);
    return out;
  }

  int aq = q > 0 ? q : -q;
  int n1 = aq;           // Laguerre index on V1
  int n2 = aq - 1;       // Laguerre index on V2
  Real tq = t_coefficient(q, p);
  Real mu = landau_dirac_level(q, p);
  Real w1 = q > 0 ? tq : 1 - tq;
  Real w2 = q > 0 ? 1 - tq : tq;

  // A component with empty support is the zero function: no term, no
  // Laplacian requirement.
  bool use1 = profile_support_radius(V.v1) > 0;
  bool use2 = profile_support_radius(V.v2) > 0;
  if (use1 && profile_lap_avail(V.v1) < n1)
    throw ConfigError("first component exposes Laplacian order " +
                      std::to_string(profile_lap_avail(V.v1)) + ", need " +
                      std::to_string(n1));
  if (use2 && profile_lap_avail(V.v2) < n2)
    throw ConfigError("second component exposes Laplacian order " +
                      std::to_string(profile_lap_avail(V.v2)) + ", need " +
                      std::to_string(n2));
  if (V.w && aq != 1)
    throw ConfigError(
        "field term needs Laplacians of the curl; a field carries first "
        "derivatives only, so |q| = 1 is the supported coupling");
  if (V.w) field_curl(*V.w, Real(0), Real(0));  // validate derivative slots

  LaguerrePoly L1 = laguerre(n1, 0);
  LaguerrePoly L2 = laguerre(n2, 0);
  Profile v1 = V.v1, v2 = V.v2;
  std::optional<ComplexField> w = V.w;
  Real b = p.b;
  out.eval = [v1, v2, w, L1, L2, w1, w2, mu, b, use1,
              use2](const Real& x, const Real& y) {
    Real acc(0);
    if (use1) acc += w1 * apply_laguerre_laplacian(v1, L1, b, x, y);
    if (use2) acc += w2 * apply_laguerre_laplacian(v2, L2, b, x, y);
    if (w) acc += field_curl(*w, x, y) / mu;  // L^{(1)}_0 = 1
    return acc;
  };
  out.radial = is_radial(v1) && is_radial(v2) && !V.w;
  out.support_radius =
      std::max(profile_support_radius(v1), profile_support_radius(v2));
  if (V.w) out.support_radius = std::max(out.support_radius, w->support_radius);
  return out;
}

namespace {

// v1 + Lap v1 / (2b) evaluated radially; the shared core of both
// constructed second components.
Real level_one_core(const SmoothRadial& v1, const Real& b, const Real& r) {
  return v1.eval(r) + v1.laplacians[0](r) / (2 * b);
}

void require_first_laplacian(const SmoothRadial& v1) {
  if (!v1.eval) throw ConfigError("profile carries no evaluator");
  if (v1.laplacians.empty() || !v1.laplacians[0])
    throw ConfigError("construction needs the first Laplacian of v1");
}

}  // namespace

SmoothRadial cancelling_v2(const SmoothRadial& v1, const Real& eps,
                           const MagneticParams& p, int check_points) {
  p.validate();
  require_first_laplacian(v1);
  if (!(eps > 0) || !(eps < 1)) throw ConfigError("eps must lie in (0,1)");
  if (check_points < 16) throw ConfigError("too few hypothesis check points");

  Real b = p.b;
  Real R = v1.support_radius;
  if (!(R > 0)) throw ConfigError("v1 must declare a positive support radius");

  // Hypothesis: the core is nonnegative, so the scaled negative copy stays
  // a genuine lower component.  A definite failure names the radius.
  std::vector<Real> vals(check_points);
  Real vmax(0);
  for (int i = 0; i < check_points; ++i) {
    Real r = R * Real(i) / (check_points - 1);
    vals[i] = level_one_core(v1, b, r);
    vmax = std::max(vmax, abs(vals[i]));
  }
  Real tol = numeric_zero_cutoff() * (1 + vmax);
  for (int i = 0; i < check_points; ++i)
    if (vals[i] < -tol) {
      Real r = R * Real(i) / (check_points - 1);
      throw HypothesisFailure(
          "v1 + Lap v1/(2b) is negative at r = " + to_decimal_string(r) +
          " (value " + to_decimal_string(vals[i]) + ")");
    }

  Real t1 = t_coefficient(1, p);
  Real c = t1 * (1 + eps) / ((1 - t1) * (1 - eps));

  SmoothRadial out;
  out.support_radius = R;
  out.built_bits = precision_bits();
  out.smoothness = v1.smoothness >= kSmoothInf
                       ? kSmoothInf
                       : std::max(0, v1.smoothness - 2);
  out.definite_sign = -1;
  SmoothRadial src = v1;
  out.eval = [src, b, c](const Real& r) {
    return -c * level_one_core(src, b, r);
  };
  for (size_t j = 0; j + 1 < v1.laplacians.size(); ++j) {
    auto lj = v1.laplacians[j];
    auto lj1 = v1.laplacians[j + 1];
    out.laplacians.push_back([lj, lj1, b, c](const Real& r) {
      return -c * (lj(r) + lj1(r) / (2 * b));
    });
  }
  out.descriptor = "cancelling second component of (" + v1.descriptor + ")";
  return out;
}

SmoothRadial suppressing_v2(const SmoothRadial& v1, const MagneticParams& p) {
  p.validate();
  require_first_laplacian(v1);
  Real b = p.b;
  Real t1 = t_coefficient(1, p);
  Real c = 2 * t1 / (1 - t1);

  SmoothRadial out;
  out.support_radius = v1.support_radius;
  out.built_bits = precision_bits();
  out.smoothness = 0;  // the absolute value is merely continuous
  out.definite_sign = -1;
  SmoothRadial src = v1;
  out.eval = [src, b, c](const Real& r) {
    return -c * abs(level_one_core(src, b, r));
  };
  out.descriptor = "suppressing second component of (" + v1.descriptor + ")";
  return out;
}

namespace {

// ---- mollifier machinery ----

Real bump_integrand(const Real& s) {
  if (!(s > 0) || !(s < 2)) return Real(0);
  return exp(1 / (s * (s - 2)));
}

Real bump_gp(const Real& r) {  // g'
  if (!(r > 0) || !(r < 2)) return Real(0);
  return -exp(1 / (r * (r - 2)));
}

Real bump_gpp(const Real& r) {  // g''
  if (!(r > 0) || !(r < 2)) return Real(0);
  Real d = r * (r - 2);
  return 2 * (r - 1) * exp(1 / d) / (d * d);
}

struct GTable {
  int n = 0;
  Real h{0};
  Real g0{0};
  std::vector<std::array<Real, 6>> cell;  // monomial coeffs in u = (r-ri)/h

  Real eval(const Real& r) const {
    if (!(r < 2)) return Real(0);
    if (!(r > 0)) return g0;
    int i = static_cast<int>((r / h).convert_to<long>());
    i = std::min(std::max(i, 0), n - 1);
    Real u = r / h - i;
    const auto& a = cell[i];
    Real acc = a[5];
    for (int k = 4; k >= 0; --k) acc = acc * u + a[k];
    return acc;
  }
};

std::shared_ptr<const GTable> bump_table() {
  static std::mutex mu;
  static std::map<unsigned, std::shared_ptr<const GTable>> cache;
  unsigned bits = precision_bits();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(bits);
  if (it != cache.end()) return it->second;

  auto table = std::make_shared<GTable>();
  int n = 8192;
  table->n = n;
  table->h = Real(2) / n;
  const auto& rule = gl_rule(24);

  // Knot values by backward accumulation of panel integrals; the integrand
  // vanishes to all orders at both endpoints, so fixed panels are exact to
  // working precision.
  std::vector<Real> g(n + 1);
  g[n] = 0;
  for (int i = n - 1; i >= 0; --i) {
    Real a = table->h * i, b = table->h * (i + 1);
    Real mid = (a + b) / 2, half = (b - a) / 2;
    Real acc(0);
    for (const auto& [x, wgt] : rule) acc += wgt * bump_integrand(mid + half * x);
    g[i] = g[i + 1] + acc * half;
  }
  table->g0 = g[0];

  // Quintic two-point Hermite per cell; values and both derivatives are
  // exact at the knots, leaving only the h^6 interpolation remainder.
  table->cell.resize(n);
  Real h = table->h;
  for (int i = 0; i < n; ++i) {
    Real r0 = h * i, r1 = h * (i + 1);
    Real f0 = g[i], f1 = g[i + 1];
    Real d0 = h * bump_gp(r0), d1 = h * bump_gp(r1);
    Real s0 = h * h * bump_gpp(r0), s1 = h * h * bump_gpp(r1);
    auto& a = table->cell[i];
    a[0] = f0;
    a[1] = d0;
    a[2] = s0 / 2;
    a[3] = -10 * f0 - 6 * d0 - 3 * s0 / 2 + 10 * f1 - 4 * d1 + s1 / 2;
    a[4] = 15 * f0 + 8 * d0 + 3 * s0 / 2 - 15 * f1 + 7 * d1 - s1;
    a[5] = -6 * f0 - 3 * d0 - s0 / 2 + 6 * f1 - 3 * d1 + s1 / 2;
  }
  cache[bits] = table;
  return table;
}

// Dense scan plus local golden-section refinement of a continuous function
// on (0, 2); enough accuracy for hypothesis margins held with headroom.
Real sup_on_interval(const std::function<Real(const Real&)>& f) {
  int n = 16384;
  Real best(0), bestr(0);
  for (int i = 1; i < n; ++i) {
    Real r = Real(2) * i / n;
    Real v = abs(f(r));
    if (v > best) {
      best = v;
      bestr = r;
    }
  }
  Real lo = bestr - Real(2) / n, hi = bestr + Real(2) / n;
  Real phi = (sqrt(Real(5)) - 1) / 2;
  for (int it = 0; it < 120; ++it) {
    Real m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    if (abs(f(m1)) < abs(f(m2)))
      lo = m1;
    else
      hi = m2;
  }
  return std::max(best, abs(f((lo + hi) / 2)));
}

}  // namespace

BumpReport appendix_bump(unsigned bits, std::optional<Real> delta_override) {
  PrecisionGuard guard(bits);
  BumpReport rep;

  // eta: the radius in (1,2) where the radial Laplacian of g changes sign,
  // the positive root of 2(r-1) = r(r-2)^2.
  auto psi = [](const Real& r) { return 2 * (r - 1) - r * (r - 2) * (r - 2); };
  Real lo(1), hi(2);
  for (unsigned it = 0; it < precision_bits() + 16; ++it) {
    Real mid = (lo + hi) / 2;
    (psi(mid) < 0 ? lo : hi) = mid;
  }
  rep.eta = (lo + hi) / 2;

  auto table = bump_table();
  rep.g_at_eta = table->eval(rep.eta);
  rep.sup_second = sup_on_interval(bump_gpp);
  rep.sup_slope_over_r =
      sup_on_interval([](const Real& r) { return bump_gp(r) / r; });

  Real margin = rep.g_at_eta / 2;
  if (delta_override) {
    rep.delta = *delta_override;
    if (!(rep.delta > 0)) throw ConfigError("delta must be positive");
    if (!(rep.delta * rep.delta * rep.sup_second < margin) ||
        !(rep.delta * rep.sup_slope_over_r < margin))
      throw HypothesisFailure(
          "delta = " + to_decimal_string(rep.delta) +
          " violates the mollifier smallness inequalities");
  } else {
    Real d1 = sqrt(margin / rep.sup_second);
    Real d2 = margin / rep.sup_slope_over_r;
    rep.delta = Real(9) / 10 * std::min(d1, d2);
  }

  Real delta = rep.delta;
  rep.bump.support_radius = 2 / delta;
  rep.bump.built_bits = precision_bits();
  rep.bump.smoothness = kSmoothInf;
  rep.bump.definite_sign = 1;
  rep.bump.eval = [table, delta](const Real& r) { return table->eval(delta * r); };
  rep.bump.ddr = [delta](const Real& r) { return delta * bump_gp(delta * r); };
  // Radial Laplacian of g(delta r); the slope term tends to delta^2 g''(0)
  // as r -> 0, and g'' vanishes flat there, so the origin value is zero.
  rep.bump.laplacians.push_back([delta](const Real& r) {
    if (!(r > 0)) return Real(0);
    return delta * delta * bump_gpp(delta * r) + delta * bump_gp(delta * r) / r;
  });
  rep.bump.descriptor = "mollifier delta=" + to_decimal_string(rep.delta);
  return rep;
}

}  // namespace ldk
