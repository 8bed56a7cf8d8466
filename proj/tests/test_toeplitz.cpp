// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "eigen_oracle.hpp"
#include "ldk/gammainc.hpp"
#include "ldk/toeplitz.hpp"

#include <algorithm>
#include <random>
#include <vector>

using namespace ldk;

namespace {

MagneticParams B2() { return MagneticParams{Real(2), Real(0)}; }

HermitianMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HermitianMatrix H = HermitianMatrix::zero(n, "random");
  for (int i = 0; i < n; ++i) {
    H.set(i, i, Complex(Real(u(rng))));
    for (int j = i + 1; j < n; ++j)
      H.set(i, j, Complex(Real(u(rng)), Real(u(rng))));
  }
  return H;
}

}  // namespace

TEST_CASE("two-by-two and diagonal oracles") {
  set_precision_bits(256);
  HermitianMatrix H = HermitianMatrix::zero(2, "swap");
  H.set(0, 1, Complex(Real(1)));
  Spectrum s = hermitian_eigenvalues(H);
  REQUIRE(s.values.size() == 2);
  CHECK(abs(s.values[0] - 1) < Real(1e-70));
  CHECK(abs(s.values[1] + 1) < Real(1e-70));

  HermitianMatrix D = HermitianMatrix::zero(4, "diag");
  D.set(0, 0, Complex(Real(-3)));
  D.set(1, 1, Complex(Real(7)));
  D.set(2, 2, Complex(Real(0)));
  D.set(3, 3, Complex(Real(2)));
  Spectrum sd = hermitian_eigenvalues(D);
  CHECK(sd.values[0] == 7);
  CHECK(sd.values[1] == 2);
  CHECK(sd.values[2] == 0);
  CHECK(sd.values[3] == -3);

  HermitianMatrix one = HermitianMatrix::zero(1, "scalar");
  one.set(0, 0, Complex(Real(5)));
  CHECK(hermitian_eigenvalues(one).values[0] == 5);
}

TEST_CASE("jacobi agrees with an independent double-precision solver") {
  set_precision_bits(256);
  std::mt19937_64 rng(424242);
  for (int trial = 0; trial < 3; ++trial) {
    int n = 40;
    HermitianMatrix H = random_hermitian(n, rng);

    std::vector<std::complex<double>> dense;
    dense.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dense.emplace_back(H.at(i, j).re.convert_to<double>(),
                           H.at(i, j).im.convert_to<double>());
    std::vector<double> ref =
        ldk_test::hermitian_eigenvalues_ascending(n, dense);

    Spectrum s = hermitian_eigenvalues(H);
    REQUIRE(static_cast<int>(s.values.size()) == n);
    for (int i = 0; i < n; ++i) {
      double ours = s.values[i].convert_to<double>();
      CHECK(std::abs(ours - ref[n - 1 - i]) < 1e-12);
    }
  }
}

TEST_CASE("spectral trace identities at working precision") {
  set_precision_bits(256);
  std::mt19937_64 rng(7);
  HermitianMatrix H = random_hermitian(25, rng);
  Spectrum s = hermitian_eigenvalues(H);
  Real sum(0), sumsq(0);
  for (const auto& v : s.values) {
    sum += v;
    sumsq += v * v;
  }
  Real fro = H.frobenius();
  CHECK(abs(sum - H.trace()) < Real(1e-70));
  CHECK(abs(sumsq - fro * fro) < Real(1e-70));
}

TEST_CASE("eigenvalues of a similarity-rotated diagonal survive grading") {
  set_precision_bits(256);
  // D with widely graded spectrum, conjugated by three exact-arithmetic
  // complex rotations; the solver must recover the tiny entries relatively.
  std::vector<Real> d = {Real(1), Real("1e-10"), Real("1e-30"), Real("1e-60")};
  int n = 4;
  std::vector<std::vector<Complex>> M(n, std::vector<Complex>(n));
  for (int i = 0; i < n; ++i) M[i][i] = Complex(d[i]);
  auto rotate = [&](int p, int q, const Real& angle, const Real& phase) {
    Real c = cos(angle), s = sin(angle);
    Complex u(cos(phase), sin(phase));
    // M <- R* M R with R = [[c, s u], [-s conj(u), c]] on (p, q).
    for (int i = 0; i < n; ++i) {
      Complex tp = M[i][p], tq = M[i][q];
      M[i][p] = c * tp - s * (conj(u) * tq);
      M[i][q] = s * (u * tp) + c * tq;
    }
    for (int j = 0; j < n; ++j) {
      Complex tp = M[p][j], tq = M[q][j];
      M[p][j] = c * tp - s * (u * tq);
      M[q][j] = s * (conj(u) * tp) + c * tq;
    }
  };
  rotate(0, 1, Real(1) / 3, Real(1) / 5);
  rotate(2, 3, Real(2) / 7, Real(-3) / 11);
  rotate(1, 2, Real(1) / 2, Real(1) / 7);
  rotate(0, 3, Real(3) / 13, Real(2) / 3);

  HermitianMatrix H = HermitianMatrix::zero(n, "graded");
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      H.set(i, j, i == j ? Complex((M[i][j].re + conj(M[j][i]).re) / 2)
                         : (M[i][j] + conj(M[j][i])) / Real(2));

  Spectrum s = hermitian_eigenvalues(H);
  std::sort(d.begin(), d.end(), [](const Real& a, const Real& b) { return a > b; });
  for (int i = 0; i < n; ++i)
    CHECK(abs(s.values[i] - d[i]) < Real(1e-12) * d[i]);
}

TEST_CASE("disk toeplitz at level zero is the gamma diagonal") {
  set_precision_bits(256);
  Real R(1);
  int K = 30;
  Profile disk = RadialStep::disk(R);
  HermitianMatrix H = assemble_landau_toeplitz(0, disk, K, B2());
  CHECK(H.offdiag_frobenius() == 0);
  for (int k = 0; k <= K; ++k) {
    Real oracle = reg_lower_gamma(k, B2().b * R * R / 2);
    CHECK(abs(H.at(k, k).re - oracle) < Real(1e-70));
  }
  Spectrum s = hermitian_eigenvalues(H);
  // P(k+1, x) is strictly decreasing in k, so sorting is the identity.
  for (int k = 0; k <= K; ++k) {
    Real oracle = reg_lower_gamma(k, B2().b * R * R / 2);
    CHECK(abs(s.values[k] - oracle) < Real(1e-25));
  }
  // Midpoint thresholds count exactly k eigenvalues above them.
  for (int k = 1; k <= K; ++k) {
    Real mid = (s.values[k - 1] + s.values[k]) / 2;
    CHECK(counting(mid, s, +1) == k);
  }

  HermitianMatrix Z = assemble_landau_toeplitz(0, RadialStep::zero(), 8, B2());
  CHECK(Z.frobenius() == 0);
}

TEST_CASE("level-one disk diagonal matches hand-built ladder moments") {
  set_precision_bits(256);
  Real R("1.3");
  Real b = B2().b;
  int K = 12;
  RadialStep disk = RadialStep::disk(R);
  HermitianMatrix H = assemble_landau_toeplitz(1, Profile(disk), K, B2());
  CHECK(H.offdiag_frobenius() == 0);

  // phi_{k,1} = (1/sqrt(2b)) (-2ik z^{k-1} + i b z^k zbar) c_k with
  // c_k the seed amplitude; its diagonal element expands into three moments.
  Real trace_oracle(0);
  for (int k = 0; k <= K; ++k) {
    Real c2 = b / (2 * pi_value() * factorial_real(k)) * pow(b / 2, k);
    Real acc = b * b * gaussian_moment(k + 1, disk, b);
    if (k >= 1)
      acc += 4 * k * k * gaussian_moment(k - 1, disk, b) -
             4 * k * b * gaussian_moment(k, disk, b);
    Real oracle = c2 * acc / (2 * b);
    CHECK(abs(H.at(k, k).re - oracle) < Real(1e-65));
    trace_oracle += oracle;
  }
  CHECK(abs(H.trace() - trace_oracle) < Real(1e-60));
}

TEST_CASE("positivity of nonnegative multipliers") {
  set_precision_bits(256);
  HermitianMatrix H =
      assemble_landau_toeplitz(1, Profile(RadialStep::disk(Real(2))), 24, B2());
  Spectrum s = hermitian_eigenvalues(H);
  for (const auto& v : s.values) CHECK(v >= Real(-1e-25));
}

TEST_CASE("truncation growth for a non-radial potential") {
  set_precision_bits(128);
  // Non-radial sampled potential gives genuine off-diagonal mass; principal
  // submatrix eigenvalues must not decrease when K grows.
  Grid2D g = Grid2D::sample(Real(-4), Real(-4), Real(8), Real(8), 100, 100,
                            [](const Real& x, const Real& y) {
                              Real r2 = x * x + y * y;
                              return exp(-r2) * (1 + x / 2);
                            });
  QuadControl qc;
  qc.rel_tol = Real(1e-3);
  qc.start_cells = 32;
  qc.max_doublings = 4;

  auto assemble_small = [&](int K) {
    std::vector<LadderFunction> basis;
    for (int k = 0; k <= K; ++k)
      basis.push_back(build_basis_function({k, 0}, B2()));
    HermitianMatrix H = HermitianMatrix::zero(K + 1, "grid toeplitz");
    for (int j = 0; j <= K; ++j)
      for (int k = j; k <= K; ++k) {
        Complex e = matrix_element(Profile(g), basis[j], basis[k], 0, nullptr, qc);
        if (j == k) e = Complex(e.re);
        H.set(j, k, e);
      }
    return H;
  };
  Spectrum s3 = hermitian_eigenvalues(assemble_small(3));
  Spectrum s5 = hermitian_eigenvalues(assemble_small(5));
  for (size_t i = 0; i < s3.values.size(); ++i)
    CHECK(s5.values[i] >= s3.values[i] - Real(1e-9));

  // Radial disk case across nested truncations: the matrix is diagonal and
  // shared eigenvalues agree exactly.
  set_precision_bits(256);
  std::vector<Spectrum> specs;
  for (int K : {20, 40, 60})
    specs.push_back(hermitian_eigenvalues(
        assemble_landau_toeplitz(0, Profile(RadialStep::disk(Real(1))), K, B2())));
  for (size_t i = 0; i < specs[0].values.size(); ++i) {
    CHECK(specs[1].values[i] >= specs[0].values[i] - Real(1e-70));
    CHECK(specs[2].values[i] >= specs[1].values[i] - Real(1e-70));
  }
}

TEST_CASE("level-zero reduction ignores the other components") {
  set_precision_bits(256);
  PotentialSpec Va, Vb;
  Va.v1 = RadialStep::disk(Real(1));
  Va.v2 = RadialStep::disk(Real(2), Real(5));
  Vb.v1 = RadialStep::disk(Real(1));
  Vb.v2 = RadialStep::make({{Real(0), Real(1), Real(-3)}});
  HermitianMatrix A = assemble_dirac_toeplitz(0, Va, 10, B2());
  HermitianMatrix B = assemble_dirac_toeplitz(0, Vb, 10, B2());
  CHECK(A.same_entries(B));
  HermitianMatrix M0 =
      assemble_landau_toeplitz(0, Va.v1, 10, B2());
  CHECK(A.same_entries(M0));
}

TEST_CASE("massless level-one matrix is the half-half mixture") {
  set_precision_bits(256);
  PotentialSpec V;
  V.v1 = RadialStep::disk(Real(1));
  V.v2 = RadialStep::disk(Real(1));
  int K = 8;
  HermitianMatrix T = assemble_dirac_toeplitz(1, V, K, B2());
  HermitianMatrix mix = HermitianMatrix::zero(K + 1, "manual");
  mix.add_scaled(assemble_landau_toeplitz(1, V.v1, K, B2()), Real(1) / 2);
  mix.add_scaled(assemble_landau_toeplitz(0, V.v2, K, B2()), Real(1) / 2);
  CHECK(T.same_entries(mix));
}

TEST_CASE("negative level keeps only the second component when v1 vanishes") {
  set_precision_bits(256);
  MagneticParams p{Real(2), Real(1)};
  PotentialSpec V;
  V.v1 = RadialStep::zero();
  V.v2 = RadialStep::disk(Real("1.5"), Real("0.8"));
  int K = 8;
  HermitianMatrix T = assemble_dirac_toeplitz(-1, V, K, p);
  HermitianMatrix manual = HermitianMatrix::zero(K + 1, "manual");
  manual.add_scaled(assemble_landau_toeplitz(0, V.v2, K, p),
                    t_coefficient(-1, p));
  CHECK(T.same_entries(manual));
}

TEST_CASE("anti-diagonal coupling blocks") {
  set_precision_bits(128);
  MagneticParams p = B2();
  int K = 4;
  QuadControl qc;
  qc.rel_tol = Real(1e-4);
  qc.start_cells = 64;
  qc.max_doublings = 5;
  PotentialSpec V;
  V.v1 = RadialStep::zero();
  V.v2 = RadialStep::zero();

  // w = conj(z): couples nothing at all.  <phi_{j,0}, conj(z) phi_{k,1}> is
  // the conjugate of <phi_{k,1}, z phi_{j,0}>, and z phi_{j,0} is again a
  // pure first-column function, orthogonal to the whole second column.
  ComplexField w;
  w.support_radius = 7;
  w.eval = [](const Real& x, const Real& y) { return Complex(x, -y); };
  w.descriptor = "conj(z)";
  V.w = w;
  for (int q : {1, -1}) {
    HermitianMatrix T = assemble_dirac_toeplitz(q, V, K, p, qc);
    for (int j = 0; j <= K; ++j)
      for (int k = 0; k <= K; ++k) CHECK(abs(T.at(j, k)) < Real(1e-8));
  }

  // w = i z: the surviving part of the block is diagonal and real.
  ComplexField wi;
  wi.support_radius = 7;
  wi.eval = [](const Real& x, const Real& y) { return Complex(-y, x); };
  wi.descriptor = "i z";
  V.w = wi;
  HermitianMatrix Tp = assemble_dirac_toeplitz(1, V, K, p, qc);
  HermitianMatrix Tm = assemble_dirac_toeplitz(-1, V, K, p, qc);

  // Oracle: A_kk = <phi_{k,0}, i z phi_{k,1}> by exact moments, where the
  // multiplier shifts monomials by one z power.
  Real factor = sqrt(2 * p.b) / (2 * landau_dirac_level(1, p));
  REQUIRE(factor > 0);
  REQUIRE(landau_dirac_level(-1, p) < 0);
  Real scale(0);
  for (int k = 0; k <= K; ++k) scale = std::max(scale, abs(Tp.at(k, k)));
  REQUIRE(scale > Real("0.5"));
  for (int j = 0; j <= K; ++j)
    for (int k = 0; k <= K; ++k) {
      Complex oracle;
      if (j == k) {
        auto lo = build_basis_function({k, 0}, p);
        auto hi = build_basis_function({k, 1}, p);
        LadderFunction zhi;
        zhi.b = hi.b;
        for (const auto& [ij, c] : hi.coeffs)
          zhi.add(ij.first + 1, ij.second, c * Complex(Real(0), Real(1)));
        Complex a = inner_product(lo, zhi);
        oracle = Complex(2 * factor * a.re);
      }
      CHECK(abs(Tp.at(j, k) - oracle) < Real(2e-3) * scale);
      // Mirrored level: same magnitude, opposite sign of mu.
      CHECK(abs(Tp.at(j, k) + Tm.at(j, k)) < Real(4e-3) * scale);
    }
}

TEST_CASE("counting thresholds") {
  Spectrum s;
  s.values = {Real(3), Real(1), Real(-2)};
  s.zero_cutoff = Real(1e-30);
  CHECK(counting(Real(2), s, +1) == 1);
  CHECK(counting(Real(1), s, -1) == 1);
  CHECK(counting(Real(1), s, +1) == 1);   // strict inequality
  CHECK(counting(Real("0.5"), s, +1) == 2);
  CHECK_THROWS_AS(counting(Real(0), s, +1), ConfigError);
  CHECK_THROWS_AS(counting(Real(1), s, 2), ConfigError);

  Spectrum t;
  t.values = {Real(2), Real("1e-40"), Real("-1e-41"), Real(-1)};
  t.zero_cutoff = Real("1e-38");
  auto pos = t.positive();
  auto neg = t.negative();
  REQUIRE(pos.size() == 1);
  REQUIRE(neg.size() == 1);
  CHECK(pos[0] == 2);
  CHECK(neg[0] == -1);
}

TEST_CASE("componentwise bracketing") {
  set_precision_bits(256);
  Real eps("0.1");
  PotentialSpec V;
  V.v1 = RadialStep::disk(Real(1));  // nonnegative
  V.v2 = RadialStep::make(
      {{Real(0), Real(1), Real(-1)}, {Real(1), Real(2), Real(4)}});
  auto [lo, hi] = epsilon_bracket(V, eps);
  const auto& lo1 = std::get<RadialStep>(lo.v1);
  const auto& hi1 = std::get<RadialStep>(hi.v1);
  CHECK(lo1.annuli[0].value == Real(1) - eps);
  CHECK(hi1.annuli[0].value == Real(1) + eps);
  const auto& lo2 = std::get<RadialStep>(lo.v2);
  const auto& hi2 = std::get<RadialStep>(hi.v2);
  CHECK(lo2.annuli[0].value == -(1 + eps));
  CHECK(hi2.annuli[0].value == -(1 - eps));
  CHECK(lo2.annuli[1].value == 4 * (1 - eps));
  CHECK(hi2.annuli[1].value == 4 * (1 + eps));

  PotentialSpec W = V;
  ComplexField f;
  f.support_radius = 1;
  f.eval = [](const Real&, const Real&) { return Complex(Real(1)); };
  W.w = f;
  CHECK_THROWS_AS(epsilon_bracket(W, eps), ConfigError);
  CHECK_THROWS_AS(epsilon_bracket(V, Real(0)), ConfigError);
  CHECK_THROWS_AS(epsilon_bracket(V, Real(1)), ConfigError);
}
