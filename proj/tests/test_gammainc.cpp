// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldk/bigfloat.hpp"
#include "ldk/gammainc.hpp"

#include <random>

using namespace ldk;

namespace {

// Independent oracle: the ascending series
//   gamma(a, x) = x^a e^{-x} sum_{n>=0} x^n / (a (a+1) ... (a+n)),
// regularized by k!.  Different algorithm from the closed form under test.
Real series_reg_lower_gamma(unsigned k, const Real& x) {
  if (x.is_zero()) return Real(0);
  Real a(k + 1);
  Real term = 1 / a;  // n = 0 term of the bracketed sum
  Real sum = term;
  Real stop = ldexp(Real(1), -static_cast<int>(precision_bits()) - 16);
  for (unsigned n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (term < stop * sum) break;
  }
  return pow(x, a) * exp(-x) * sum / factorial_real(k);
}

}  // namespace

TEST_CASE("closed form matches the ascending series") {
  set_precision_bits(256);
  std::mt19937_64 rng(20260816);
  std::uniform_real_distribution<double> xs(0.05, 130.0);
  std::uniform_int_distribution<unsigned> ks(0, 60);
  for (int trial = 0; trial < 60; ++trial) {
    unsigned k = ks(rng);
    Real x(xs(rng));
    Real closed = reg_lower_gamma(k, x);
    Real series = series_reg_lower_gamma(k, x);
    // The subtraction in the closed form loses ~e^x of headroom.
    Real tol = exp(x) * ldexp(Real(1), -236);
    CHECK(abs(closed - series) <= tol);
  }
}

TEST_CASE("small-order closed forms") {
  set_precision_bits(256);
  Real x("1.375");
  CHECK(abs(reg_lower_gamma(0, x) - (1 - exp(-x))) < Real(1e-70));
  CHECK(abs(reg_lower_gamma(1, x) - (1 - exp(-x) * (1 + x))) < Real(1e-70));
  CHECK(reg_lower_gamma(7, Real(0)) == 0);
  CHECK_THROWS_AS(reg_lower_gamma(3, Real(-1)), ConfigError);
}

TEST_CASE("shape: monotone in x, saturates at 1") {
  set_precision_bits(256);
  Real prev(-1);
  for (int i = 0; i <= 40; ++i) {
    Real x = Real(i) / 4;
    Real v = reg_lower_gamma(5, x);
    CHECK(v >= prev);
    CHECK(v <= 1);
    prev = v;
  }
  CHECK(abs(reg_lower_gamma(5, Real(200)) - 1) < Real(1e-60));
}

TEST_CASE("unregularized variant") {
  set_precision_bits(256);
  Real x("2.5");
  CHECK(abs(lower_gamma(4, x) - factorial_real(4) * reg_lower_gamma(4, x))
            .is_zero());
}
