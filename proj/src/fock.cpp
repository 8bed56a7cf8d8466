// SPDX-License-Identifier: Apache-2.0

#include "ldk/fock.hpp"

#include "ldk/gammainc.hpp"

#include <algorithm>

namespace ldk {

void MagneticParams::validate() const {
  if (!(b > 0)) throw ConfigError("field amplitude b must be positive");
  if (!(m >= 0)) throw ConfigError("mass m must be nonnegative");
}

void LadderFunction::add(int i, int j, const Complex& c) {
  if (i < 0 || j < 0) throw ConfigError("monomial powers must be nonnegative");
  auto key = std::make_pair(i, j);
  auto it = coeffs.find(key);
  if (it == coeffs.end()) {
    if (!c.is_zero()) coeffs.emplace(key, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) coeffs.erase(it);
}

int LadderFunction::angular_momentum() const {
  if (coeffs.empty())
    throw ConfigError("zero function has no angular momentum");
  int ell = coeffs.begin()->first.first - coeffs.begin()->first.second;
  for (const auto& [ij, c] : coeffs)
    if (ij.first - ij.second != ell)
      throw NumericalFailure("mixed angular momenta in one ladder function");
  return ell;
}

Real landau_dirac_level(int q, const MagneticParams& p) {
  p.validate();
  Real inner = 2 * p.b * abs(Real(q)) + p.m * p.m;
  Real mu = sqrt(inner);
  return q < 0 ? -mu : mu;
}

Real t_coefficient(int q, const MagneticParams& p) {
  p.validate();
  if (q == 0) return Real(1);
  return (1 + p.m / abs(landau_dirac_level(q, p))) / 2;
}

LadderFunction ladder_raise(const LadderFunction& f) {
  LadderFunction out;
  out.b = f.b;
  out.k = f.k;
  out.n = f.n + 1;
  for (const auto& [ij, c] : f.coeffs) {
    auto [i, j] = ij;
    // a* (z^i conj(z)^j G) = -i (2i z^{i-1} conj(z)^j - b z^i conj(z)^{j+1}) G
    if (i >= 1) out.add(i - 1, j, c * Complex(Real(0), Real(-2 * i)));
    out.add(i, j + 1, c * Complex(Real(0), f.b));
  }
  out.norm_sq = inner_product(out, out).re;
  return out;
}

LadderFunction ladder_lower(const LadderFunction& f) {
  LadderFunction out;
  out.b = f.b;
  out.k = f.k;
  out.n = std::max(0, f.n - 1);
  for (const auto& [ij, c] : f.coeffs) {
    auto [i, j] = ij;
    // a (z^i conj(z)^j G) = -2ij z^i conj(z)^{j-1} G
    if (j >= 1) out.add(i, j - 1, c * Complex(Real(0), Real(-2 * j)));
  }
  out.norm_sq = out.is_zero() ? Real(0) : inner_product(out, out).re;
  return out;
}

LadderFunction build_basis_function(const BasisIndex& idx,
                                    const MagneticParams& p) {
  p.validate();
  if (idx.k < 0 || idx.n < 0)
    throw ConfigError("basis indices must be nonnegative");
  LadderFunction f;
  f.b = p.b;
  f.k = idx.k;
  f.n = 0;
  Real seed =
      sqrt(p.b / (2 * pi_value() * factorial_real(idx.k))) *
      pow(p.b / 2, Real(idx.k) / 2);
  f.coeffs.emplace(std::make_pair(idx.k, 0), Complex(seed));
  for (int s = 1; s <= idx.n; ++s) {
    f = ladder_raise(f);
    Real scale = sqrt(2 * p.b * s);
    for (auto& [ij, c] : f.coeffs) c = c / scale;
    f.norm_sq /= scale * scale;
  }
  f.norm_sq = inner_product(f, f).re;
  return f;
}

Complex inner_product(const LadderFunction& f, const LadderFunction& g) {
  if (f.is_zero() || g.is_zero()) return Complex();
  if (f.b != g.b)
    throw ConfigError("inner product requires matching field amplitude");
  int maxP = 0;
  for (const auto& [ij1, c1] : f.coeffs)
    for (const auto& [ij2, c2] : g.coeffs)
      if (ij1.first + ij2.second == ij1.second + ij2.first)
        maxP = std::max(maxP, ij1.first + ij2.second);
  // Full-plane monomial moment: integral of |z|^{2P} e^{-b|z|^2/2} dm
  // = (2 pi / b) (2/b)^P P!
  std::vector<Real> mom(maxP + 1);
  mom[0] = 2 * pi_value() / f.b;
  for (int P = 1; P <= maxP; ++P) mom[P] = mom[P - 1] * (Real(2) / f.b) * P;
  Complex acc;
  for (const auto& [ij1, c1] : f.coeffs)
    for (const auto& [ij2, c2] : g.coeffs) {
      int P = ij1.first + ij2.second;
      if (P != ij1.second + ij2.first) continue;
      acc += conj(c1) * c2 * mom[P];
    }
  return acc;
}

Real gaussian_moment(int a, const RadialStep& v, const Real& b,
                     unsigned bits) {
  PrecisionGuard guard(bits);
  if (a < 0) throw ConfigError("moment power must be nonnegative");
  if (!(b > 0)) throw ConfigError("field amplitude b must be positive");
  Real acc(0);
  for (const auto& an : v.annuli) {
    Real hi = reg_lower_gamma(static_cast<unsigned>(a), b * an.r_hi * an.r_hi / 2);
    Real lo = reg_lower_gamma(static_cast<unsigned>(a), b * an.r_lo * an.r_lo / 2);
    acc += an.value * (hi - lo);
  }
  return (2 * pi_value() / b) * pow(Real(2) / b, a) * factorial_real(a) * acc;
}

namespace {

// One radial moment of a smooth profile by adaptive panels.  `vmax` bounds
// |v| on its support; it is scanned once per profile by the callers.
QuadResult smooth_moment(const SmoothRadial& v, const Real& b, int a,
                         const Real& vmax) {
  Real R = v.support_radius;
  if (!(R > 0)) return QuadResult{Real(0), Real(0)};
  auto integrand = [&v, &b, a](const Real& r) {
    return v.eval(r) * pow(r, 2 * a + 1) * exp(-b * r * r / 2);
  };
  // Bound on the absolute value: max|v| * full-plane moment / (2 pi).
  Real bound = vmax * pow(Real(2) / b, a) * factorial_real(a) / b;
  Real rel = numeric_zero_cutoff() / 1024;
  QuadResult q =
      integrate_adaptive(integrand, Real(0), R, rel, rel * (bound + 1));
  q.value *= 2 * pi_value();
  q.err_est *= 2 * pi_value();
  return q;
}

QuadResult moment_of(const Profile& v, const Real& b, int a,
                     const Real& vmax) {
  if (const auto* s = std::get_if<RadialStep>(&v))
    return QuadResult{gaussian_moment(a, *s, b), Real(0)};
  if (const auto* f = std::get_if<SmoothRadial>(&v))
    return smooth_moment(*f, b, a, vmax);
  throw ConfigError("radial moments need a radial profile");
}

Complex eval_poly(const LadderFunction& f, const Complex& z) {
  int max_i = 0, max_j = 0;
  for (const auto& [ij, c] : f.coeffs) {
    max_i = std::max(max_i, ij.first);
    max_j = std::max(max_j, ij.second);
  }
  std::vector<Complex> zp(max_i + 1), zbp(max_j + 1);
  zp[0] = Complex(Real(1));
  zbp[0] = Complex(Real(1));
  Complex zb = conj(z);
  for (int i = 1; i <= max_i; ++i) zp[i] = zp[i - 1] * z;
  for (int j = 1; j <= max_j; ++j) zbp[j] = zbp[j - 1] * zb;
  Complex acc;
  for (const auto& [ij, c] : f.coeffs) acc += c * zp[ij.first] * zbp[ij.second];
  return acc;
}

// Midpoint tensor rule over the grid's bounding box at n cells per axis.
// absint receives the same sum with every factor in absolute value; it is
// the natural magnitude scale for judging convergence of near-zero entries.
Complex grid_quad_pass(const Grid2D& v, const LadderFunction& f,
                       const LadderFunction& g, int n, Real& absint) {
  Real W = v.hx * v.nx, H = v.hy * v.ny;
  Real hx = W / n, hy = H / n;
  Complex acc;
  Real aacc(0);
  for (int iy = 0; iy < n; ++iy) {
    Real y = v.y0 + (Real(iy) + Real(1) / 2) * hy;
    for (int ix = 0; ix < n; ++ix) {
      Real x = v.x0 + (Real(ix) + Real(1) / 2) * hx;
      Real vv = v.eval(x, y);
      if (vv.is_zero()) continue;
      Complex z(x, y);
      Real gauss = exp(-f.b * (x * x + y * y) / 2);
      Complex term = conj(eval_poly(f, z)) * eval_poly(g, z) * (vv * gauss);
      acc += term;
      aacc += abs(term);
    }
  }
  absint = aacc * (hx * hy);
  return acc * (hx * hy);
}

}  // namespace

std::vector<Real> radial_moments(const Profile& v, const Real& b, int max_a,
                                 unsigned bits) {
  PrecisionGuard guard(bits);
  if (max_a < 0) throw ConfigError("moment power must be nonnegative");
  Real vmax = std::holds_alternative<SmoothRadial>(v) ? profile_max_abs(v)
                                                      : Real(0);
  std::vector<Real> out(max_a + 1);
  for (int a = 0; a <= max_a; ++a) out[a] = moment_of(v, b, a, vmax).value;
  return out;
}

Complex matrix_element(const Profile& v, const LadderFunction& f,
                       const LadderFunction& g, unsigned bits, Real* err_est,
                       const QuadControl& qc) {
  PrecisionGuard guard(bits);
  if (err_est) *err_est = 0;
  if (f.is_zero() || g.is_zero()) return Complex();
  if (f.b != g.b)
    throw ConfigError("matrix element requires matching field amplitude");
  if (is_radial(v)) {
    // Angular selection: only monomial pairs with equal angular momentum
    // contribute, and they reduce to radial moments.
    int maxP = -1;
    for (const auto& [ij1, c1] : f.coeffs)
      for (const auto& [ij2, c2] : g.coeffs)
        if (ij1.first + ij2.second == ij1.second + ij2.first)
          maxP = std::max(maxP, ij1.first + ij2.second);
    if (maxP < 0) return Complex();
    Real vmax = std::holds_alternative<SmoothRadial>(v) ? profile_max_abs(v)
                                                        : Real(0);
    std::vector<QuadResult> mom(maxP + 1);
    for (int a = 0; a <= maxP; ++a) mom[a] = moment_of(v, f.b, a, vmax);
    Complex acc;
    Real err(0);
    for (const auto& [ij1, c1] : f.coeffs)
      for (const auto& [ij2, c2] : g.coeffs) {
        int P = ij1.first + ij2.second;
        if (P != ij1.second + ij2.first) continue;
        Complex w = conj(c1) * c2;
        acc += w * mom[P].value;
        err += abs(w) * mom[P].err_est;
      }
    if (err_est) *err_est = err;
    return acc;
  }
  const auto& grid = std::get<Grid2D>(v);
  Real rel = qc.rel_tol > 0 ? qc.rel_tol : Real(1e-6);
  int n = std::max(2, qc.start_cells);
  Real absint(0);
  Complex prev = grid_quad_pass(grid, f, g, n, absint);
  Real last_diff(0);
  for (int d = 1; d <= qc.max_doublings; ++d) {
    n *= 2;
    Complex cur = grid_quad_pass(grid, f, g, n, absint);
    Real diff = abs(cur - prev);
    // Entries tiny against the absolute mass are converged once the change
    // is negligible on that scale; they never pass a pure relative test.
    Real scale = std::max({abs(cur), absint, numeric_zero_cutoff()});
    if (diff <= rel * scale) {
      if (err_est) *err_est = diff;
      return cur;
    }
    prev = cur;
    last_diff = diff;
  }
  throw NumericalFailure("grid quadrature did not converge; achieved bound " +
                         to_decimal_string(last_diff));
}

}  // namespace ldk
