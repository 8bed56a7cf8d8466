// SPDX-License-Identifier: Apache-2.0

#include "ldk/toeplitz.hpp"

#include <algorithm>

namespace ldk {

HermitianMatrix HermitianMatrix::zero(int dim, std::string descriptor) {
  if (dim < 1) throw ConfigError("matrix dimension must be at least 1");
  HermitianMatrix H;
  H.dim = dim;
  H.a.assign(static_cast<size_t>(dim) * dim, Complex());
  H.descriptor = std::move(descriptor);
  return H;
}

void HermitianMatrix::set(int i, int j, const Complex& v) {
  if (i == j) {
    if (!v.im.is_zero())
      throw ConfigError("diagonal entries must be real");
    a[idx(i, i)] = v;
    return;
  }
  a[idx(i, j)] = v;
  a[idx(j, i)] = conj(v);
}

void HermitianMatrix::add_scaled(const HermitianMatrix& src,
                                 const Real& factor) {
  if (src.dim != dim) throw ConfigError("dimension mismatch in add_scaled");
  for (size_t t = 0; t < a.size(); ++t) a[t] += factor * src.a[t];
}

Real HermitianMatrix::trace() const {
  Real t(0);
  for (int i = 0; i < dim; ++i) t += at(i, i).re;
  return t;
}

Real HermitianMatrix::frobenius() const {
  Real s(0);
  for (const auto& e : a) s += norm_sq(e);
  return sqrt(s);
}

Real HermitianMatrix::offdiag_frobenius() const {
  Real s(0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      if (i != j) s += norm_sq(at(i, j));
  return sqrt(s);
}

bool HermitianMatrix::same_entries(const HermitianMatrix& o) const {
  if (o.dim != dim) return false;
  for (size_t t = 0; t < a.size(); ++t)
    if (a[t].re != o.a[t].re || a[t].im != o.a[t].im) return false;
  return true;
}

std::vector<Real> Spectrum::positive() const {
  std::vector<Real> out;
  for (const auto& v : values) {
    if (v > zero_cutoff) out.push_back(v);
  }
  return out;  // source is descending, so this is non-increasing
}

std::vector<Real> Spectrum::negative() const {
  std::vector<Real> out;
  for (auto it = values.rbegin(); it != values.rend(); ++it)
    if (*it < -zero_cutoff) out.push_back(*it);
  return out;  // ascending from the most negative
}

Spectrum hermitian_eigenvalues(const HermitianMatrix& H, unsigned bits) {
  PrecisionGuard guard(bits);
  if (H.dim < 1) throw ConfigError("matrix dimension must be at least 1");
  const int n = H.dim;
  const unsigned pb = precision_bits();

  // Work on a fresh copy rounded into the current precision.
  std::vector<Complex> w(H.a.size());
  for (size_t t = 0; t < w.size(); ++t)
    w[t] = Complex(Real(H.a[t].re), Real(H.a[t].im));
  auto W = [&](int i, int j) -> Complex& {
    return w[static_cast<size_t>(i) * n + j];
  };

  Real fro = H.frobenius();
  Real rel = ldexp(Real(n), -static_cast<int>(pb) + 6);
  Real abs_skip = fro * ldexp(Real(1), -static_cast<int>(pb) + 8);
  Real abs_skip2 = abs_skip * abs_skip;

  const int sweep_cap = 100;
  int sweep = 0;
  for (; sweep < sweep_cap && n > 1; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        Complex beta = W(p, q);
        Real b2 = norm_sq(beta);
        if (b2 <= abs_skip2) continue;
        // Relative skip: keeps small diagonal pairs converging to full
        // precision instead of a norm-wide floor.
        Real diag_scale = abs(W(p, p).re * W(q, q).re);
        if (b2 <= rel * rel * diag_scale) continue;
        rotated = true;

        Real babs = sqrt(b2);
        Complex u = beta / babs;
        Real alpha = W(p, p).re;
        Real gamma = W(q, q).re;
        Real tau = (gamma - alpha) / (2 * babs);
        Real t;
        if (tau.is_zero()) {
          t = 1;
        } else {
          Real sgn = tau > 0 ? Real(1) : Real(-1);
          t = sgn / (abs(tau) + sqrt(1 + tau * tau));
        }
        Real c = 1 / sqrt(1 + t * t);
        Real s = t * c;

        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          Complex tp = W(i, p), tq = W(i, q);
          Complex np = c * tp - s * (conj(u) * tq);
          Complex nq = s * (u * tp) + c * tq;
          W(i, p) = np;
          W(p, i) = conj(np);
          W(i, q) = nq;
          W(q, i) = conj(nq);
        }
        W(p, p) = Complex(alpha - t * babs);
        W(q, q) = Complex(gamma + t * babs);
        W(p, q) = Complex();
        W(q, p) = Complex();
      }
    if (!rotated) break;
  }
  if (sweep >= sweep_cap)
    throw NumericalFailure("jacobi eigensolver hit the sweep cap");

  // Convergence certificate: residual off-diagonal mass.
  Real off(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) off += norm_sq(W(i, j));
  off = sqrt(off);
  if (off > numeric_zero_cutoff() * fro && !fro.is_zero())
    throw NumericalFailure("jacobi off-diagonal mass did not converge: " +
                           to_decimal_string(off));

  Spectrum spec;
  spec.precision_bits_used = pb;
  spec.zero_cutoff = numeric_zero_cutoff();
  spec.values.reserve(n);
  for (int i = 0; i < n; ++i) spec.values.push_back(W(i, i).re);
  std::sort(spec.values.begin(), spec.values.end(),
            [](const Real& x, const Real& y) { return x > y; });
  spec.provenance = H.descriptor + " | jacobi bits=" + std::to_string(pb) +
                    " sweeps=" + std::to_string(sweep) +
                    " cutoff=" + to_decimal_string(spec.zero_cutoff);
  return spec;
}

HermitianMatrix assemble_landau_toeplitz(int n, const Profile& v, int K,
                                         const MagneticParams& p,
                                         const QuadControl& qc) {
  p.validate();
  if (K < 1) throw ConfigError("truncation K must be at least 1");
  if (n < 0) throw ConfigError("level must be nonnegative");

  std::vector<LadderFunction> basis;
  basis.reserve(K + 1);
  for (int k = 0; k <= K; ++k)
    basis.push_back(build_basis_function({k, n}, p));

  HermitianMatrix H = HermitianMatrix::zero(
      K + 1, "landau_toeplitz level=" + std::to_string(n) +
                 " K=" + std::to_string(K));

  if (is_radial(v)) {
    // Radial multiplier at a single level: the angular selection rule makes
    // the matrix diagonal, so only <phi_{k,n}, v phi_{k,n}> is computed.
    for (int k = 0; k <= K; ++k) {
      Complex d = matrix_element(v, basis[k], basis[k], 0, nullptr, qc);
      H.set(k, k, Complex(d.re));
    }
    return H;
  }
  for (int j = 0; j <= K; ++j)
    for (int k = j; k <= K; ++k) {
      Complex e = matrix_element(v, basis[j], basis[k], 0, nullptr, qc);
      if (j == k) e = Complex(e.re);
      H.set(j, k, e);
    }
  return H;
}

Complex field_matrix_element(const ComplexField& w, const LadderFunction& f,
                             const LadderFunction& g, const QuadControl& qc) {
  if (!w.eval) throw ConfigError("complex field carries no evaluator");
  if (!(w.support_radius > 0))
    throw ConfigError("complex field must declare a positive support radius");
  if (f.is_zero() || g.is_zero()) return Complex();
  if (f.b != g.b)
    throw ConfigError("matrix element requires matching field amplitude");

  Real R = w.support_radius;
  Real rel = qc.rel_tol > 0 ? qc.rel_tol : Real(1e-6);

  int mi = 0, mj = 0;
  for (const auto& [ij, c] : f.coeffs) {
    mi = std::max(mi, ij.first);
    mj = std::max(mj, ij.second);
  }
  for (const auto& [ij, c] : g.coeffs) {
    mi = std::max(mi, ij.first);
    mj = std::max(mj, ij.second);
  }

  auto pass = [&](int cells, Real& absint) {
    Real h = 2 * R / cells;
    Complex acc;
    Real aacc(0);
    std::vector<Complex> zp(mi + 1), zbp(mj + 1);
    for (int iy = 0; iy < cells; ++iy) {
      Real y = -R + (Real(iy) + Real(1) / 2) * h;
      for (int ix = 0; ix < cells; ++ix) {
        Real x = -R + (Real(ix) + Real(1) / 2) * h;
        if (x * x + y * y > R * R) continue;
        Complex wv = w.eval(x, y);
        if (wv.is_zero()) continue;
        Complex z(x, y);
        Real gauss = exp(-f.b * (x * x + y * y) / 2);
        // f, g carry e^{-b|z|^2/4} each; conj(f) w g carries the full weight.
        Complex fz = Complex(), gz = Complex();
        zp[0] = Complex(Real(1));
        zbp[0] = Complex(Real(1));
        Complex zb = conj(z);
        for (int i = 1; i <= mi; ++i) zp[i] = zp[i - 1] * z;
        for (int j = 1; j <= mj; ++j) zbp[j] = zbp[j - 1] * zb;
        for (const auto& [ij, c] : f.coeffs)
          fz += c * zp[ij.first] * zbp[ij.second];
        for (const auto& [ij, c] : g.coeffs)
          gz += c * zp[ij.first] * zbp[ij.second];
        Complex term = conj(fz) * gz * (wv * gauss);
        acc += term;
        aacc += abs(term);
      }
    }
    Real area = (Real(2) * R / cells) * (Real(2) * R / cells);
    absint = aacc * area;
    return acc * area;
  };

  int cells = std::max(2, qc.start_cells);
  Real absint(0);
  Complex prev = pass(cells, absint);
  Real last(0);
  for (int d = 1; d <= qc.max_doublings; ++d) {
    cells *= 2;
    Complex cur = pass(cells, absint);
    Real diff = abs(cur - prev);
    // Near-cancelling entries converge on the scale of the absolute mass;
    // the disk-mask boundary flutter alone keeps them off a relative test.
    Real scale = std::max({abs(cur), absint, numeric_zero_cutoff()});
    if (diff <= rel * scale) return cur;
    prev = cur;
    last = diff;
  }
  throw NumericalFailure("field quadrature did not converge; achieved bound " +
                         to_decimal_string(last));
}

HermitianMatrix assemble_dirac_toeplitz(int q, const PotentialSpec& V, int K,
                                        const MagneticParams& p,
                                        const QuadControl& qc) {
  p.validate();
  if (K < 1) throw ConfigError("truncation K must be at least 1");

  if (q == 0) {
    // T_0 keeps only the first diagonal component; V2 and W never enter.
    HermitianMatrix H = assemble_landau_toeplitz(0, V.v1, K, p, qc);
    H.descriptor = "dirac_toeplitz q=0 K=" + std::to_string(K);
    return H;
  }

  Real tq = t_coefficient(q, p);
  Real mu = landau_dirac_level(q, p);
  int aq = q > 0 ? q : -q;

  HermitianMatrix H = HermitianMatrix::zero(
      K + 1, "dirac_toeplitz q=" + std::to_string(q) + " K=" + std::to_string(K));
  if (q > 0) {
    H.add_scaled(assemble_landau_toeplitz(q, V.v1, K, p, qc), tq);
    H.add_scaled(assemble_landau_toeplitz(q - 1, V.v2, K, p, qc), 1 - tq);
  } else {
    H.add_scaled(assemble_landau_toeplitz(aq - 1, V.v2, K, p, qc), tq);
    H.add_scaled(assemble_landau_toeplitz(aq, V.v1, K, p, qc), 1 - tq);
  }

  if (V.w) {
    // Ladder factors turn the a*-coupled block into matrix elements between
    // adjacent levels: sqrt(2b|q|)/(2 mu_q) (A + A^*), with
    //   q > 0: A_{jk} = <phi_{j,q-1}, W phi_{k,q}>
    //   q < 0: A_{jk} = <phi_{j,|q|}, conj(W) phi_{k,|q|-1}>
    Real factor = sqrt(2 * p.b * aq) / (2 * mu);
    int n_hi = aq, n_lo = aq - 1;
    std::vector<LadderFunction> lo, hi;
    for (int k = 0; k <= K; ++k) {
      lo.push_back(build_basis_function({k, n_lo}, p));
      hi.push_back(build_basis_function({k, n_hi}, p));
    }
    ComplexField wbar = *V.w;
    auto weval = V.w->eval;
    wbar.eval = [weval](const Real& x, const Real& y) {
      return conj(weval(x, y));
    };
    std::vector<std::vector<Complex>> A(K + 1, std::vector<Complex>(K + 1));
    for (int j = 0; j <= K; ++j)
      for (int k = 0; k <= K; ++k)
        A[j][k] = q > 0 ? field_matrix_element(*V.w, lo[j], hi[k], qc)
                        : field_matrix_element(wbar, hi[j], lo[k], qc);
    for (int j = 0; j <= K; ++j)
      for (int k = j; k <= K; ++k) {
        Complex upd = H.at(j, k) + factor * (A[j][k] + conj(A[k][j]));
        if (j == k) upd = Complex(upd.re);
        H.set(j, k, upd);
      }
  }
  return H;
}

int counting(const Real& s, const Spectrum& spec, int sign) {
  if (!(s > 0)) throw ConfigError("counting threshold must be positive");
  if (sign != 1 && sign != -1) throw ConfigError("sign must be +1 or -1");
  int c = 0;
  for (const auto& v : spec.values) {
    if (sign == 1 && v > s) ++c;
    if (sign == -1 && v < -s) ++c;
  }
  return c;
}

std::pair<PotentialSpec, PotentialSpec> epsilon_bracket(const PotentialSpec& V,
                                                        const Real& eps) {
  if (V.w)
    throw ConfigError(
        "bracketing needs a diagonal potential; the matrix absolute value of "
        "an anti-diagonal part is unsupported");
  if (!(eps > 0) || !(eps < 1)) throw ConfigError("eps must lie in (0,1)");
  PotentialSpec lo, hi;
  lo.v1 = abs_bracket(V.v1, eps, -1);
  lo.v2 = abs_bracket(V.v2, eps, -1);
  hi.v1 = abs_bracket(V.v1, eps, +1);
  hi.v2 = abs_bracket(V.v2, eps, +1);
  return {lo, hi};
}

}  // namespace ldk
