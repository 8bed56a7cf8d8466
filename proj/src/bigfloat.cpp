// SPDX-License-Identifier: Apache-2.0

#include "ldk/bigfloat.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>

namespace ldk {

namespace {

unsigned g_bits = 256;

// Applies the 256-bit default to the backend at load time, before any other
// translation unit can construct a Real at the backend's own startup default.
// Namespace-scope Reals elsewhere are still a bad idea (their precision is
// whatever was current when they were built); the library keeps none.
const bool g_default_applied = [] {
  Real::default_precision(
      static_cast<unsigned>(std::ceil(256 * 0.3010299957)) + 2);
  return true;
}();

}  // namespace

void set_precision_bits(unsigned bits) {
  if (bits < 24 || bits > 1u << 20) {
    throw ConfigError("precision bits out of range [24, 2^20]: " +
                      std::to_string(bits));
  }
  g_bits = bits;
  // digits10 covering at least `bits` mantissa bits.
  unsigned digits10 = static_cast<unsigned>(std::ceil(bits * 0.3010299957)) + 2;
  Real::default_precision(digits10);
}

unsigned precision_bits() { return g_bits; }

Real numeric_zero_cutoff() {
  using mp::pow;
  return pow(Real(2), -static_cast<int>(g_bits / 2));
}

Real pi_value() { return boost::math::constants::pi<Real>(); }

Real factorial_real(unsigned k) {
  Real f = 1;
  for (unsigned j = 2; j <= k; ++j) f *= j;
  return f;
}

std::string to_decimal_string(const Real& x) {
  return x.str(0, std::ios_base::scientific);
}

}  // namespace ldk
