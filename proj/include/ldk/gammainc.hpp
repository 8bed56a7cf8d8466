// SPDX-License-Identifier: Apache-2.0
//
// Lower incomplete gamma of integer order, the closed-form kernel behind all
// radial step integrals.

#pragma once

#include "ldk/bigfloat.hpp"

namespace ldk {

// P(k+1, x) = 1 - e^{-x} * sum_{j<=k} x^j/j!, the regularized lower gamma.
//
// The subtraction cancels when the tail is small: absolute error is
// ~ e^{|x|} * 2^{-precision_bits}.  Callers needing relative accuracy of tiny
// tails (Weyl-sequence work) must raise the working precision; the absolute
// floor is what the toolkit-wide 10^-25 tolerances are calibrated against.
Real reg_lower_gamma(unsigned k, const Real& x);

// gamma(k+1, x) = k! * P(k+1, x), unregularized.
Real lower_gamma(unsigned k, const Real& x);

}  // namespace ldk
