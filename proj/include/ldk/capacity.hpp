// SPDX-License-Identifier: Apache-2.0
//
// Logarithmic capacity of planar compact sets: transfinite-diameter lower
// sequence, Chebyshev upper sequence, extrapolated capacity, Gram-determinant
// monic minima, the spectral-asymptotics constant, and the encirclement
// decision procedure.
//
// Geometry and optimization run in double precision (the optimizer tolerance
// dwarfs rounding); the monic minima use big floats because Gram determinant
// ratios collapse catastrophically in fixed precision.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ldk/profiles.hpp"

namespace ldk {

// Planar region, closed under union and set difference.  Bounded, nonempty.
// The set-operation kinds exist because the encirclement tests need annuli
// and slit annuli, which the four primitive kinds cannot express.
struct Region {
  enum class Kind { disk, segment, polygon, annulus, unite, difference };
  Kind kind = Kind::disk;

  double cx = 0, cy = 0;      // disk, annulus center
  double r = 0;               // disk radius, annulus outer radius
  double r_inner = 0;         // annulus inner radius
  double ax = 0, ay = 0, bx = 0, by = 0;          // segment endpoints
  std::vector<std::pair<double, double>> vertices; // polygon, closed implicitly
  std::vector<Region> children;  // unite: any count; difference: {left, cut}

  static Region disk(double cx, double cy, double r);
  static Region segment(double ax, double ay, double bx, double by);
  static Region polygon(std::vector<std::pair<double, double>> vs);
  static Region annulus(double cx, double cy, double r_inner, double r_outer);
  static Region unite(std::vector<Region> parts);
  static Region difference(Region left, Region cut);

  void validate() const;  // throws ConfigError
};

struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

Box region_bbox(const Region& e);

// Signed distance, negative inside.  Exact for primitives and annuli; for
// unions and differences the sign is exact but the magnitude is only a
// lower bound on the true distance (standard CSG min/max composition).
double region_sdf(const Region& e, double x, double y);

inline bool region_contains(const Region& e, double x, double y,
                            double tol = 0) {
  return region_sdf(e, x, y) <= tol;
}

struct CapacityControl {
  int boundary_target = 4096;  // candidate points over the whole boundary
  int max_sweeps = 60;         // discrete ascent sweeps per n
  int refine_rounds = 2;       // continuous per-point polish passes
};

// Greedy Leja sequence on the boundary discretization: each point maximizes
// the product of distances to the points already chosen.
std::vector<std::complex<double>> leja_points(const Region& e, int n,
                                              const CapacityControl& ctl = {});

struct DiameterResult {
  double value = 0;     // lower bound on delta_n
  bool converged = false;
  int sweeps = 0;
};

// n-th transfinite diameter: max over n-point configurations of the geometric
// mean of pairwise distances.  Leja seeding, cyclic coordinate ascent over
// the boundary candidates, then continuous single-point polish along the
// boundary curves.  Products live in log space throughout.
DiameterResult transfinite_diameter(const Region& e, int n,
                                    const CapacityControl& ctl = {});

// (sup_E |f_n|)^{1/n} for the monic polynomial f_n with the given roots; an
// upper bound for the capacity whatever the roots.  The default takes the
// degree-n Leja prefix.
double chebyshev_bound(const Region& e, int n,
                       const CapacityControl& ctl = {});
double chebyshev_bound_with_roots(const Region& e,
                                  const std::vector<std::complex<double>>& roots,
                                  const CapacityControl& ctl = {});

struct CapacityEstimate {
  std::vector<double> lower_seq;  // delta_n, n = 2..n_max
  std::vector<double> upper_seq;  // Chebyshev values, n = 1..n_max
  double extrapolated = 0;
  int n_max = 0;
  bool converged = false;  // every diameter ascent reached stationarity
};

// Both sequences plus the fitted limit.  Model on the last third of the
// diameter sequence: ln delta_n = ln Cap + c ln n/(n-1) + d/n; the shifted
// denominator reproduces the disk law n^{1/(n-1)} exactly.
CapacityEstimate capacity_estimate(const Region& e, int n_max,
                                   const CapacityControl& ctl = {});

// M_k = det G_{k+1} / det G_k for the Gram matrix of 1, z, ..., z^k in
// L^2(w dm): the squared distance from z^k to the lower-degree polynomials.
// The weight must be nonnegative (declared definite sign) with compact
// support.  Radial weights make G diagonal and M_k a single moment; grid
// weights go through a big-float Cholesky factorization.
// Throws HypothesisFailure when the Gram matrix is numerically singular
// (weight effectively supported on fewer than k+1 points).
Real monic_l2_minimum(const Profile& w, int k, unsigned bits = 0);

// 1 + ln(b/2 * cap^2): the constant term of the three-term counting
// asymptotics.
double asym_constant(double cap, double b);

// Capacity of the support region, then the constant.  side = +1 uses the
// support as given; side = -1 is meaningful only for potentials sandwiched
// between multiples of the indicator of their support, where both constants
// agree; anything else is rejected.
double asym_constant(const Region& support, double b, int side,
                     bool sandwiched = true, int n_max = 60,
                     const CapacityControl& ctl = {});

enum class Encircle { encircled, not_encircled, unresolved };
std::string to_string(Encircle v);

// Does the open set omega (interior of the region) contain a Jordan curve
// with k inside?  Rasterized decision: flood-fill the complement from the
// frame to find the unbounded component; encircled needs every k cell off
// that component's closure and a wall of at least two cells between the
// bounded and unbounded complement parts.  Grid-ambiguous cases return
// unresolved rather than guessing.
Encircle encircles(const Region& omega, const Region& k, int resolution);

}  // namespace ldk
