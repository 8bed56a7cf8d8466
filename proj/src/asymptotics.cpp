// SPDX-License-Identifier: Apache-2.0

#include "ldk/asymptotics.hpp"

#include <algorithm>
#include <string>

namespace ldk {

WeylSequence weyl_sequence(const std::vector<Real>& nu, int k_lo, int k_hi) {
  if (k_lo < 1) throw ConfigError("the root sequence starts at k = 1");
  if (k_hi < k_lo) throw ConfigError("empty k range");

  Real top(0);
  for (const Real& v : nu) top = std::max(top, abs(v));
  Real cutoff = numeric_zero_cutoff() * (1 + top);

  int usable = -1;
  for (size_t k = 0; k < nu.size() && nu[k] > cutoff; ++k) usable = int(k);
  if (usable < k_hi)
    throw ConfigError("insufficient usable eigenvalues: last usable k is " +
                      std::to_string(usable) + ", requested " +
                      std::to_string(k_hi));

  WeylSequence ws;
  ws.k_lo = k_lo;
  ws.k_hi = k_hi;
  ws.cutoff = cutoff;
  Real lnfact(0);
  for (int j = 2; j <= k_lo - 1; ++j) lnfact += log(Real(j));
  for (int k = k_lo; k <= k_hi; ++k) {
    if (k >= 2) lnfact += log(Real(k));
    Real t = lnfact + log(nu[k]);
    ws.log_knu.push_back(t);
    ws.s.push_back(exp(t / k));
  }
  return ws;
}

WeylSequence weyl_sequence(const Spectrum& spec, int k_lo, int k_hi) {
  return weyl_sequence(spec.positive(), k_lo, k_hi);
}

namespace {

// Solve a small symmetric positive system by Gaussian elimination.
void solve3(Real a[3][3], Real rhs[3], Real x[3]) {
  int perm[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int rw = col + 1; rw < 3; ++rw)
      if (abs(a[perm[rw]][col]) > abs(a[perm[piv]][col])) piv = rw;
    std::swap(perm[col], perm[piv]);
    if (a[perm[col]][col] == 0)
      throw NumericalFailure("degenerate regression system");
    for (int rw = col + 1; rw < 3; ++rw) {
      Real f = a[perm[rw]][col] / a[perm[col]][col];
      for (int cc = col; cc < 3; ++cc)
        a[perm[rw]][cc] -= f * a[perm[col]][cc];
      rhs[perm[rw]] -= f * rhs[perm[col]];
    }
  }
  for (int col = 2; col >= 0; --col) {
    Real acc = rhs[perm[col]];
    for (int cc = col + 1; cc < 3; ++cc) acc -= a[perm[col]][cc] * x[cc];
    x[col] = acc / a[perm[col]][col];
  }
}

}  // namespace

LimitFit limit_fit(const WeylSequence& ws) {
  int n = int(ws.log_knu.size());
  if (n < 8) throw ConfigError("limit fit needs at least 8 points");

  Real a[3][3] = {{Real(0), Real(0), Real(0)},
                  {Real(0), Real(0), Real(0)},
                  {Real(0), Real(0), Real(0)}};
  Real rhs[3] = {Real(0), Real(0), Real(0)};
  for (int i = 0; i < n; ++i) {
    Real k(ws.k_lo + i);
    Real g[3] = {k, log(k), Real(1)};
    for (int p = 0; p < 3; ++p) {
      rhs[p] += g[p] * ws.log_knu[i];
      for (int q = 0; q < 3; ++q) a[p][q] += g[p] * g[q];
    }
  }
  Real x[3];
  solve3(a, rhs, x);

  LimitFit fit;
  fit.points = n;
  fit.ln_slope = x[0];
  Real lo(0), hi(0), worst(0);
  for (int i = 0; i < n; ++i) {
    Real k(ws.k_lo + i);
    Real e = ws.log_knu[i] - (x[0] * k + x[1] * log(k) + x[2]);
    worst = std::max(worst, abs(e));
    Real ek = e / k;
    if (i == 0) {
      lo = ek;
      hi = ek;
    } else {
      lo = std::min(lo, ek);
      hi = std::max(hi, ek);
    }
  }
  fit.max_abs_residual = worst;
  fit.liminf_est = exp(x[0] + lo);
  fit.limsup_est = exp(x[0] + hi);
  return fit;
}

Real three_term_value(const Real& lambda, const Real& c) {
  if (!(lambda > 0)) throw ConfigError("lambda must be positive");
  Real l1 = -log(lambda);  // |ln lambda| once lambda < 1
  if (!(l1 > exp(Real(1))))
    throw ConfigError("lambda must be below e^{-e} for the iterated logs");
  Real l2 = log(l1);
  Real l3 = log(l2);
  return l1 / l2 + l1 * l3 / (l2 * l2) + c * l1 / (l2 * l2);
}

std::vector<Real> log_lambda_grid(double lo, double hi, int points) {
  if (points < 1) throw ConfigError("grid needs at least one point");
  if (!(lo > 2.72)) throw ConfigError("|ln lambda| must exceed e");
  if (!(hi >= lo)) throw ConfigError("grid bounds out of order");
  std::vector<Real> out;
  out.reserve(points);
  for (int i = 0; i < points; ++i) {
    double L = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    out.push_back(exp(-Real(L)));
  }
  return out;
}

SandwichReport sandwich_report(const Spectrum& spec, const Real& c_minus,
                               const Real& c_plus,
                               const std::vector<Real>& lambda_grid,
                               const Real& slack) {
  if (c_minus > c_plus) throw ConfigError("sandwich constants out of order");
  if (slack < 0) throw ConfigError("slack must be nonnegative");

  SandwichReport rep;
  rep.c_minus = c_minus;
  rep.c_plus = c_plus;
  rep.slack = slack;
  rep.applicable = !spec.positive().empty();
  rep.all_within = rep.applicable;

  for (const Real& lambda : lambda_grid) {
    if (!(lambda > 0)) throw ConfigError("lambda must be positive");
    Real l1 = -log(lambda);
    if (!(l1 > exp(Real(1))))
      throw ConfigError("lambda must be below e^{-e} for the iterated logs");
    Real l2 = log(l1);
    Real l3 = log(l2);
    SandwichRow row;
    row.lambda = lambda;
    row.n_plus = counting(lambda, spec, +1);
    Real two_terms = l1 / l2 + l1 * l3 / (l2 * l2);
    row.residual = (row.n_plus - two_terms) * l2 * l2 / l1;
    row.within = row.residual >= c_minus - slack &&
                 row.residual <= c_plus + slack;
    rep.all_within = rep.all_within && row.within;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace ldk
