// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ldk/fock.hpp"
#include "ldk/profiles.hpp"

namespace ldk {

using Rational = boost::multiprecision::cpp_rational;

// Generalized Laguerre polynomial with exact rational coefficients,
// coeffs[j] multiplying t^j.
struct LaguerrePoly {
  int q = 0;
  int m = 0;
  std::vector<Rational> coeffs;

  Real eval(const Real& t) const;
};

// L_q^{(m)};  coefficient of t^j is binom(q+m, q-j) (-1)^j / j!.
LaguerrePoly laguerre(int q, int m);

// The scalar field Re(d2 w) - Im(d1 w).  Requires both derivative slots.
Real field_curl(const ComplexField& w, const Real& x, const Real& y);

// A pointwise-evaluable scalar symbol on the plane.
struct EffectiveSymbol {
  std::function<Real(const Real&, const Real&)> eval;
  bool radial = false;
  Real support_radius{0};
  std::string descriptor;

  // Radial evaluation; meaningful when radial is set.
  Real eval_radial(const Real& r) const { return eval(r, Real(0)); }
};

// First-order spectral symbol at level q.  Substituting t -> -Lap/(2b) into
// the Laguerre weights turns every coefficient positive:
//   q > 0:  t_q L0_q V1 + (1-t_q) L0_{q-1} V2 + (1/mu_q) L1_{q-1} curl
//   q < 0:  (1-t_q) L0_{|q|} V1 + t_q L0_{|q|-1} V2 + (1/mu_q) L1_{|q|-1} curl
//   q = 0:  V1 alone.
// Diagonal components must expose enough Laplacian orders; the field part is
// supported for |q| = 1 only, since a ComplexField carries first derivatives.
EffectiveSymbol effective_symbol(int q, const PotentialSpec& V,
                                 const MagneticParams& p);

// Second component making the level-one symbol of V + eps|V| vanish
// identically:  v2 = -(t1 (1+eps)) / ((1-t1)(1-eps)) * (v1 + Lap v1 / (2b)).
// Requires v1 + Lap v1/(2b) >= 0; the hypothesis is checked on a radial grid
// and a violation reports the offending radius.  The result keeps one fewer
// Laplacian order than the input.
SmoothRadial cancelling_v2(const SmoothRadial& v1, const Real& eps,
                           const MagneticParams& p, int check_points = 4096);

// Second component pushing the level-one symbol of V + eps|V| below zero for
// every eps < 1/3:  v2 = -(2 t1 / (1-t1)) |v1 + Lap v1 / (2b)|.  The absolute
// value costs all smoothness, so the result carries no Laplacian oracles.
SmoothRadial suppressing_v2(const SmoothRadial& v1, const MagneticParams& p);

// The compactly supported mollifier built from
//   g(r) = int_r^2 exp(1/(s(s-2))) ds  on (0, 2),  zero beyond.
// bump(x) = g(delta |x|) with delta chosen so that
//   delta^2 sup|g''| < g(eta)/2   and   delta sup|g'(r)/r| < g(eta)/2,
// where eta in (1, 2) solves 2(r-1) = r(r-2)^2, the radius where the radial
// Laplacian of g changes sign.  Both inequalities together keep
// bump + Lap(bump) nonnegative, which cancelling_v2 needs at b >= 1/2.
struct BumpReport {
  Real delta{0};
  Real eta{0};
  Real g_at_eta{0};
  Real sup_second{0};         // sup |g''| on (0,2)
  Real sup_slope_over_r{0};   // sup |g'(r)/r| on (0,2)
  SmoothRadial bump;
};

// delta_override, when given, is validated against the two inequalities
// instead of being derived from them.  Evaluations interpolate a dense
// quintic table with exact derivative knots; absolute accuracy is near
// 1e-19, far below working precision but ample for counting experiments.
BumpReport appendix_bump(unsigned bits = 0,
                         std::optional<Real> delta_override = std::nullopt);

}  // namespace ldk
