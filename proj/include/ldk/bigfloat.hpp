// SPDX-License-Identifier: Apache-2.0
//
// Arbitrary-precision scalars shared by all modules.
//
// Real is an mpfr-backed float whose working precision is set process-wide at
// runtime.  Complex is the minimal complex layer needed for Hermitian matrix
// work; std::complex is not specified for non-builtin scalars, so we carry our
// own.  All precision bookkeeping is in mantissa bits even though the backend
// is driven in decimal digits.

#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>

namespace ldk {

namespace mp = boost::multiprecision;

using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

// Error taxonomy mirrored by the CLI exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HypothesisFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sets the working precision for all Reals constructed afterwards.
// The mpfr mantissa is set to at least `bits`.
void set_precision_bits(unsigned bits);
unsigned precision_bits();

// 2^(-precision_bits/2): the global "numerically zero" threshold.
Real numeric_zero_cutoff();

// Scoped precision override: restores the previous setting on exit.
// bits == 0 keeps the current precision (a no-op guard).
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits) : saved_(precision_bits()) {
    if (bits != 0 && bits != saved_) set_precision_bits(bits);
  }
  ~PrecisionGuard() {
    if (precision_bits() != saved_) set_precision_bits(saved_);
  }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

Real pi_value();

// k! as a Real at working precision (exact while representable).
Real factorial_real(unsigned k);

// Round-trip-safe decimal form.
std::string to_decimal_string(const Real& x);

struct Complex {
  Real re{0};
  Real im{0};

  Complex() = default;
  Complex(Real r) : re(std::move(r)) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(double r) : re(r) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
};

inline Complex operator+(const Complex& a, const Complex& b) {
  return {a.re + b.re, a.im + b.im};
}
inline Complex operator-(const Complex& a, const Complex& b) {
  return {a.re - b.re, a.im - b.im};
}
inline Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
inline Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Complex operator*(const Real& s, const Complex& a) {
  return {s * a.re, s * a.im};
}
inline Complex operator*(const Complex& a, const Real& s) { return s * a; }
inline Complex operator/(const Complex& a, const Real& s) {
  return {a.re / s, a.im / s};
}
inline Complex conj(const Complex& a) { return {a.re, -a.im}; }
inline Real norm_sq(const Complex& a) { return a.re * a.re + a.im * a.im; }
inline Real abs(const Complex& a) {
  using mp::sqrt;
  return sqrt(norm_sq(a));
}
inline Complex operator/(const Complex& a, const Complex& b) {
  Real n = norm_sq(b);
  Complex num = a * conj(b);
  return {num.re / n, num.im / n};
}

}  // namespace ldk
