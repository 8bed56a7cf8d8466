// SPDX-License-Identifier: Apache-2.0
//
// Eigenvalue-decay analysis: the factorial-compensated root sequence
// s_k = (k! nu_k)^{1/k}, its fitted limit band, and the iterated-logarithm
// three-term counting law with its sandwich residual.

#pragma once

#include <vector>

#include "ldk/toeplitz.hpp"

namespace ldk {

struct WeylSequence {
  int k_lo = 0, k_hi = 0;       // inclusive index range, k >= 1
  std::vector<Real> log_knu;    // ln(k! nu_k) for k = k_lo..k_hi
  std::vector<Real> s;          // s_k = exp(ln(k! nu_k)/k)
  Real cutoff{0};               // positivity cutoff applied to nu
};

// From a raw decay sequence nu (indexed from 0); every nu_k in the range
// must exceed the numeric-zero cutoff.  Throws ConfigError naming the last
// usable index when the range overruns the data.
WeylSequence weyl_sequence(const std::vector<Real>& nu, int k_lo, int k_hi);

// Positive eigenvalues of the spectrum, largest first, as nu.
WeylSequence weyl_sequence(const Spectrum& spec, int k_lo, int k_hi);

struct LimitFit {
  Real liminf_est{0};
  Real limsup_est{0};
  Real ln_slope{0};         // k-coefficient of the ln(k! nu_k) regression
  Real max_abs_residual{0};
  int points = 0;
};

// Least squares of ln(k! nu_k) against {k, ln k, 1} over the sequence.  The
// ln k regressor absorbs the polynomial prefactor that would otherwise bias
// the slope by O(1/k); exp(slope) estimates the limit of s_k, and the
// windowed extremes of residual/k give the liminf/limsup band.
LimitFit limit_fit(const WeylSequence& ws);

// |ln l| / ln_2 + |ln l| ln_3 / ln_2^2 + c |ln l| / ln_2^2, where
// ln_2 = ln |ln l| and ln_3 = ln ln_2.  Needs l < e^{-e} so that ln_2 > 1.
Real three_term_value(const Real& lambda, const Real& c);

// lambdas exp(-L) for L linearly spaced over [lo, hi]: the natural grid for
// iterated-logarithm laws, where linear lambda grids are useless.
std::vector<Real> log_lambda_grid(double lo, double hi, int points);

struct SandwichRow {
  Real lambda;
  int n_plus = 0;
  Real residual{0};  // (n_+ - two leading terms) * ln_2^2 / |ln lambda|
  bool within = false;
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  Real c_minus{0}, c_plus{0}, slack{0};
  bool applicable = false;   // false when the positive spectrum is empty
  bool all_within = false;
};

// For each lambda, count n_+(lambda) and confine the residual to
// [c_minus - slack, c_plus + slack].  The o(1) in the counting law is never
// thresholded: slack is the caller's tolerance, reported back verbatim.
SandwichReport sandwich_report(const Spectrum& spec, const Real& c_minus,
                               const Real& c_plus,
                               const std::vector<Real>& lambda_grid,
                               const Real& slack = Real(0));

}  // namespace ldk
