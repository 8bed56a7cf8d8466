// SPDX-License-Identifier: Apache-2.0
//
// Potential profiles: radial step functions, closed-form smooth radial
// profiles carrying Laplacian oracles, and sampled 2-D grids, plus the
// quadrature utilities used to integrate them.
//
// A profile built under one working precision captures constants at that
// precision; rebuild profiles after set_precision_bits.

#pragma once

#include "ldk/bigfloat.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ldk {

struct Annulus {
  Real r_lo;
  Real r_hi;
  Real value;
};

struct RadialStep {
  std::vector<Annulus> annuli;  // sorted by r_lo, pairwise disjoint

  static RadialStep disk(const Real& radius, const Real& value = Real(1));
  static RadialStep zero() { return RadialStep{}; }

  // Validates ordering/disjointness and drops empty annuli.
  static RadialStep make(std::vector<Annulus> as);

  Real support_radius() const;
  Real eval(const Real& r) const;
  Real max_abs() const;
  // +1 if all values >= 0, -1 if all <= 0, else 0.
  int definite_sign() const;
};

constexpr int kSmoothInf = 1 << 20;

struct SmoothRadial {
  Real support_radius{0};
  unsigned built_bits{0};
  // Highest meaningful classical derivative order: kSmoothInf for C^inf
  // closed forms, 0 for merely continuous profiles.
  int smoothness{0};
  int definite_sign{0};  // +1 nonnegative, -1 nonpositive, 0 mixed/unknown
  std::function<Real(const Real&)> eval;
  // laplacians[j-1] evaluates (Delta^j f)(r) as a radial function.
  std::vector<std::function<Real(const Real&)>> laplacians;
  std::function<Real(const Real&)> ddr;  // f'(r), may be null
  std::string descriptor;
};

struct Grid2D {
  Real x0{0}, y0{0};  // lower-left corner of the bounding box
  Real hx{1}, hy{1};  // cell sizes
  int nx{0}, ny{0};   // samples sit at cell centers
  std::vector<Real> values;  // row-major: ix + nx*iy

  static Grid2D sample(const Real& x0, const Real& y0, const Real& width,
                       const Real& height, int nx, int ny,
                       const std::function<Real(const Real&, const Real&)>& f);

  // Bilinear between cell centers, clamped inside the outer half-cells,
  // zero outside the box.
  Real eval(const Real& x, const Real& y) const;
  Real support_radius() const;
  Real max_abs() const;
};

using Profile = std::variant<RadialStep, SmoothRadial, Grid2D>;

bool is_radial(const Profile& p);
Real profile_support_radius(const Profile& p);
// Radial kinds only; throws ConfigError for Grid2D.
Real profile_eval_radial(const Profile& p, const Real& r);
Real profile_eval(const Profile& p, const Real& x, const Real& y);
Real profile_max_abs(const Profile& p);
int profile_definite_sign(const Profile& p);

// Highest Laplacian order the profile can serve: 0 for steps, the oracle
// count for smooth radial profiles, 2 for grids (iterated 5-point stencils).
int laplacian_order_available(const Profile& p);
// (Delta^order f) at radius r for radial kinds (order 0 = the profile).
Real profile_laplacian_radial(const Profile& p, int order, const Real& r);
// Same at a point; grids use 5-point stencils with Richardson step control.
Real profile_laplacian(const Profile& p, int order, const Real& x,
                       const Real& y);

// Pointwise f -> f + s*eps*|f| (s = +-1).  Exact for steps; smooth profiles
// keep their Laplacian oracles only when they have definite sign, otherwise
// the result is degraded to C^0.
Profile abs_bracket(const Profile& p, const Real& eps, int s);

// Anti-diagonal entry W of the potential matrix, with first-derivative
// oracles for the induced field amplitude.
struct ComplexField {
  std::function<Complex(const Real&, const Real&)> eval;
  std::function<Complex(const Real&, const Real&)> d1;  // d/dx1, may be null
  std::function<Complex(const Real&, const Real&)> d2;  // d/dx2, may be null
  Real support_radius{0};
  std::string descriptor;
};

// V = [[V1, W*], [W, V2]]
struct PotentialSpec {
  Profile v1 = RadialStep::zero();
  Profile v2 = RadialStep::zero();
  std::optional<ComplexField> w;
};

// ---- quadrature utilities ----

// Gauss-Legendre nodes/weights on [-1,1], cached per (npts, precision).
const std::vector<std::pair<Real, Real>>& gl_rule(int npts);

struct QuadResult {
  Real value;
  Real err_est;
};

// Panel-bisection adaptive quadrature over fixed GL panels.  `rel_tol` is
// relative to the accumulated value, `abs_floor` stops refinement of
// negligible panels.  Throws NumericalFailure past `max_depth`.  Bisection is
// local, so the default depth is generous: an isolated kink costs ~2 panels
// per level, not 2^depth.
QuadResult integrate_adaptive(const std::function<Real(const Real&)>& f,
                              const Real& a, const Real& b,
                              const Real& rel_tol, const Real& abs_floor,
                              int max_depth = 96);

}  // namespace ldk
