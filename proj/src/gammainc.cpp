// SPDX-License-Identifier: Apache-2.0

#include "ldk/gammainc.hpp"

namespace ldk {

Real reg_lower_gamma(unsigned k, const Real& x) {
  if (x < 0) throw ConfigError("reg_lower_gamma: negative argument");
  if (x.is_zero()) return Real(0);
  // term_j = x^j / j!, accumulated without recomputing powers.
  Real term = 1;
  Real sum = 1;
  for (unsigned j = 1; j <= k; ++j) {
    term *= x;
    term /= j;
    sum += term;
  }
  using mp::exp;
  return 1 - exp(-x) * sum;
}

Real lower_gamma(unsigned k, const Real& x) {
  return factorial_real(k) * reg_lower_gamma(k, x);
}

}  // namespace ldk
