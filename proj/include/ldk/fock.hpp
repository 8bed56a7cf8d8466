// SPDX-License-Identifier: Apache-2.0
//
// Angular momentum basis on the magnetic plane: exact polynomial-times-
// Gaussian representations, ladder operators, and the Gaussian moment
// integrals behind every matrix element of a multiplication operator.
//
// Convention: z = x1 + i x2, the Wirtinger derivative is
// d = d/dx1 - i d/dx2 = 2 d/dz, and the ladders are a* = -i(d - conj(z) b/2),
// a = -i(dbar + z b/2).  On a monomial u = z^p conj(z)^q e^{-b|z|^2/4} this
// gives a* u = -i (2p z^{p-1} conj(z)^q - b z^p conj(z)^{q+1}) e^{...} and
// a u = -2iq z^p conj(z)^{q-1} e^{...}; the sign choice is pinned down by the
// ladder identities the tests check, not re-derived per call site.

#pragma once

#include "ldk/bigfloat.hpp"
#include "ldk/profiles.hpp"

#include <map>
#include <utility>
#include <vector>

namespace ldk {

struct MagneticParams {
  Real b;            // field amplitude, > 0
  Real m{0};         // mass, >= 0
  void validate() const;
};

struct BasisIndex {
  int k;  // radial seed index, >= 0
  int n;  // level index, >= 0
};

// A finite sum  sum c_{ij} z^i conj(z)^j e^{-b|z|^2/4}.
struct LadderFunction {
  std::map<std::pair<int, int>, Complex> coeffs;
  Real b{0};
  Real norm_sq{0};  // recomputed exact L2 norm of the sum
  int k{0};         // generating BasisIndex, carried through ladder calls
  int n{0};

  bool is_zero() const { return coeffs.empty(); }
  // Accumulates a coefficient, dropping exact zeros.
  void add(int i, int j, const Complex& c);
  // Common angular momentum i - j of all monomials (k - n for basis
  // functions); throws for the zero function.
  int angular_momentum() const;
};

// mu_q: sqrt(2bq + m^2) for q >= 0, the negative branch for q < 0.
Real landau_dirac_level(int q, const MagneticParams& p);

// t_q = (1 + m/|mu_q|)/2 for q != 0, and t_0 = 1.
Real t_coefficient(int q, const MagneticParams& p);

// Normalized phi_{k,n}: n raising ladders applied to the seed
// sqrt(b/(2 pi k!)) (b/2)^{k/2} z^k e^{-b|z|^2/4}.
LadderFunction build_basis_function(const BasisIndex& idx,
                                    const MagneticParams& p);

// a* f; on basis functions equals sqrt(2b(n+1)) phi_{k,n+1}.
LadderFunction ladder_raise(const LadderFunction& f);
// a f; sqrt(2bn) phi_{k,n-1} on basis functions, the zero function at n = 0.
LadderFunction ladder_lower(const LadderFunction& f);

// L2(plane) inner product, antilinear in f.  Exact finite sum of Gaussian
// monomial moments.
Complex inner_product(const LadderFunction& f, const LadderFunction& g);

// integral over the plane of |z|^{2a} v(|z|) e^{-b|z|^2/2} dm(z), per annulus
// via regularized lower gamma.  `bits` != 0 raises the working precision for
// the call.
Real gaussian_moment(int a, const RadialStep& v, const Real& b,
                     unsigned bits = 0);

// Moments integral |z|^{2a} v(|z|) e^{-b|z|^2/2} dm for a = 0..max_a in one
// sweep; steps use the closed form, smooth radial profiles adaptive panels.
std::vector<Real> radial_moments(const Profile& v, const Real& b, int max_a,
                                 unsigned bits = 0);

struct QuadControl {
  Real rel_tol{0};     // 0: derive from working precision
  int start_cells = 64;   // per axis, midpoint tensor rule
  int max_doublings = 6;  // explicit failure past this
};

// <f, v g>.  Radial profiles reduce to exact gaussian_moment sums (smooth
// ones to adaptive radial panels); Grid2D uses a midpoint tensor rule with
// resolution doubling.  err_est, when non-null, receives the achieved
// agreement bound (0 for the closed-form paths).
Complex matrix_element(const Profile& v, const LadderFunction& f,
                       const LadderFunction& g, unsigned bits = 0,
                       Real* err_est = nullptr,
                       const QuadControl& qc = QuadControl{});

}  // namespace ldk
