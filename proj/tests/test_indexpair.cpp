// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldk/indexpair.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

using namespace ldk;

namespace {

using EMat = Eigen::MatrixXcd;

IndexMatrix from_eigen(const EMat& m) {
  IndexMatrix out = IndexMatrix::zero(int(m.rows()));
  for (int i = 0; i < out.dim; ++i)
    for (int j = 0; j < out.dim; ++j) out.set(i, j, m(i, j));
  return out;
}

EMat to_eigen(const IndexMatrix& m) {
  EMat out(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) out(i, j) = m.at(i, j);
  return out;
}

IndexMatrix random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  IndexMatrix m = IndexMatrix::zero(n);
  for (int i = 0; i < n; ++i) {
    m.set(i, i, g(rng));
    for (int j = i + 1; j < n; ++j) {
      std::complex<double> v(g(rng), g(rng));
      m.set(i, j, v);
      m.set(j, i, std::conj(v));
    }
  }
  return m;
}

EMat random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  EMat z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = std::complex<double>(g(rng), g(rng));
  Eigen::HouseholderQR<EMat> qr(z);
  return qr.householderQ();
}

// Projector onto the coordinate span {from, ..., from + r - 1}, conjugated.
IndexMatrix span_projector(int n, int from, int r, const EMat& U) {
  EMat d = EMat::Zero(n, n);
  for (int i = from; i < from + r; ++i) d(i, i) = 1.0;
  return from_eigen(U * d * U.adjoint());
}

// Midpoint of a wide gap of the pooled spectra, away from both.
double admissible_lambda(const IndexMatrix& A, const IndexMatrix& B,
                         std::mt19937_64& rng) {
  std::vector<double> ev = hermitian_spectrum(A);
  std::vector<double> eb = hermitian_spectrum(B);
  ev.insert(ev.end(), eb.begin(), eb.end());
  std::sort(ev.begin(), ev.end());
  std::vector<double> mids;
  for (size_t i = 0; i + 1 < ev.size(); ++i)
    if (ev[i + 1] - ev[i] > 1e-3) mids.push_back((ev[i] + ev[i + 1]) / 2);
  if (mids.empty()) return ev.back() + 1.0;
  std::uniform_int_distribution<size_t> pick(0, mids.size() - 1);
  return mids[pick(rng)];
}

}  // namespace

TEST_CASE("trivial pairs and antisymmetry") {
  std::mt19937_64 rng(7101);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + int(rng() % 9);
    EMat U = random_unitary(n, rng);
    int rp = int(rng() % (n + 1));
    int rq = int(rng() % (n + 1));
    IndexMatrix P = span_projector(n, 0, rp, U);
    IndexMatrix Q = span_projector(n, 0, rq, U);

    CHECK(index_pair(ProjectionPair{P, P}) == 0);
    CHECK(index_pair(ProjectionPair{P, IndexMatrix::zero(n)}) == rp);
    int fwd = index_pair(ProjectionPair{P, Q});
    int bwd = index_pair(ProjectionPair{Q, P});
    CHECK(fwd == rp - rq);
    CHECK(fwd == -bwd);
  }
}

TEST_CASE("commuting pair with prescribed overlap") {
  std::mt19937_64 rng(7102);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 4 + int(rng() % 37);
    int rp = 1 + int(rng() % (n - 1));
    // Start Q inside [0, n - rq] so the coordinate overlap with P is exact.
    int rq = 1 + int(rng() % (n - 1));
    int start = int(rng() % (n - rq + 1));
    int overlap = std::max(0, std::min(rp, start + rq) - std::max(0, start));
    EMat U = random_unitary(n, rng);
    IndexMatrix P = span_projector(n, 0, rp, U);
    IndexMatrix Q = span_projector(n, start, rq, U);

    // The construction fixes both kernel dimensions outright.
    CHECK(index_pair(ProjectionPair{P, Q}) == rp - rq);
    CHECK((rp - overlap) - (rq - overlap) == rp - rq);
  }
}

TEST_CASE("spectral flow of an explicit two-level crossing") {
  IndexMatrix A = IndexMatrix::diagonal({0.0, 2.0});
  IndexMatrix M = IndexMatrix::diagonal({3.0, 0.0});
  CHECK(xi(1.0, A, M) == 1);

  // One eigenvalue of A + M crosses into [1, 2.5): both sides give +1.
  IndexMatrix A2 = IndexMatrix::diagonal({0.0, 10.0});
  IndexMatrix M2 = IndexMatrix::diagonal({2.0, 0.0});
  IntervalCountReport up = verify_interval_counts(A2, M2, 1.0, 2.5);
  CHECK(up.holds);
  CHECK(up.xi_lo - up.xi_hi == 1);
  CHECK(up.count_B - up.count_A == 1);

  // One eigenvalue of A leaves the interval instead: both sides give -1.
  IndexMatrix A3 = IndexMatrix::diagonal({2.0, 10.0});
  IndexMatrix M3 = IndexMatrix::diagonal({-2.0, 0.0});
  IntervalCountReport down = verify_interval_counts(A3, M3, 1.0, 2.5);
  CHECK(down.holds);
  CHECK(down.xi_lo - down.xi_hi == -1);
  CHECK(down.count_B - down.count_A == -1);

  CHECK(xi(5.0, A, IndexMatrix::zero(2)) == 0);
}

TEST_CASE("rank-one positive bumps move the flow by at most one") {
  std::mt19937_64 rng(7103);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + int(rng() % 11);
    IndexMatrix A = random_hermitian(n, rng);
    EMat v(n, 1);
    for (int i = 0; i < n; ++i) v(i, 0) = std::complex<double>(g(rng), g(rng));
    IndexMatrix M = from_eigen(EMat(v * v.adjoint()));
    double lambda = admissible_lambda(A, A.plus(M), rng);
    int flow = xi(lambda, A, M);
    CHECK(flow >= 0);
    CHECK(flow <= 1);
  }
}

TEST_CASE("interval counting identity on random pairs") {
  std::mt19937_64 rng(7104);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + int(rng() % 39);
    IndexMatrix A = random_hermitian(n, rng);
    IndexMatrix M = random_hermitian(n, rng, 0.5);
    IndexMatrix B = A.plus(M);
    double l1 = admissible_lambda(A, B, rng);
    double l2 = admissible_lambda(A, B, rng);
    if (l1 == l2) continue;
    if (l1 > l2) std::swap(l1, l2);
    if (!verify_interval_counts(A, M, l1, l2).holds) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("rank bounds on random perturbations") {
  std::mt19937_64 rng(7105);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + int(rng() % 39);
    IndexMatrix A = random_hermitian(n, rng);
    IndexMatrix M = random_hermitian(n, rng, 0.7);
    double lambda = admissible_lambda(A, A.plus(M), rng);
    RankBoundReport rep = verify_rank_bounds(A, M, lambda);
    if (!rep.holds) ++failures;
    CHECK(rep.rank_plus + rep.rank_minus <= n);
  }
  CHECK(failures == 0);

  // Semidefinite perturbations pin the sign of the flow.
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + int(rng() % 11);
    IndexMatrix A = random_hermitian(n, rng);
    EMat W(n, 2);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) W(i, j) = std::complex<double>(g(rng), g(rng));
    IndexMatrix Mp = from_eigen(EMat(W * W.adjoint()));
    double lambda = admissible_lambda(A, A.plus(Mp), rng);
    RankBoundReport rep = verify_rank_bounds(A, Mp, lambda);
    CHECK(rep.holds);
    CHECK(rep.xi_value >= 0);
    CHECK(rep.rank_minus == 0);

    IndexMatrix Mn = Mp;
    for (auto& v : Mn.a) v = -v;
    double lambda2 = admissible_lambda(A, A.plus(Mn), rng);
    RankBoundReport rep2 = verify_rank_bounds(A, Mn, lambda2);
    CHECK(rep2.holds);
    CHECK(rep2.xi_value <= 0);
    CHECK(rep2.rank_plus == 0);
  }
}

TEST_CASE("monotone ordering and additive chains") {
  std::mt19937_64 rng(7106);
  std::normal_distribution<double> g(0.0, 1.0);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + int(rng() % 39);
    IndexMatrix A = random_hermitian(n, rng);
    IndexMatrix M2 = random_hermitian(n, rng, 0.5);
    int r = 1 + int(rng() % 3);
    EMat W(n, r);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) W(i, j) = std::complex<double>(g(rng), g(rng));
    IndexMatrix M1 = M2.plus(from_eigen(EMat(W * W.adjoint())));
    double lambda =
        admissible_lambda(A.plus(M1), A.plus(M2), rng);
    std::vector<double> ea = hermitian_spectrum(A);
    bool clear = true;
    for (double e : ea) clear = clear && std::abs(e - lambda) > 1e-6;
    if (!clear) continue;
    MonotonicityReport rep = verify_monotonicity(A, M1, M2, lambda);
    if (!rep.holds) ++failures;
    CHECK(rep.xi_1 - rep.xi_2 <= r);
  }
  CHECK(failures == 0);
}

TEST_CASE("equal perturbations and violated ordering") {
  std::mt19937_64 rng(7107);
  IndexMatrix A = random_hermitian(6, rng);
  IndexMatrix M = random_hermitian(6, rng, 0.5);
  double lambda = admissible_lambda(A, A.plus(M), rng);
  if (std::abs(lambda) < 1e-6) lambda += 0.5;
  MonotonicityReport rep = verify_monotonicity(A, M, M, lambda);
  CHECK(rep.holds);
  CHECK(rep.xi_1 == rep.xi_2);
  CHECK(rep.chain_direct == rep.chain_split);

  // M1 - M2 indefinite: the hypothesis check must reject it.
  IndexMatrix M1 = M;
  M1.set(0, 0, M.at(0, 0) - 2.0);
  CHECK_THROWS_AS(verify_monotonicity(A, M1, M, lambda),
                  std::invalid_argument);
}

TEST_CASE("flow is constant between eigenvalues") {
  std::mt19937_64 rng(7108);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 3 + int(rng() % 10);
    IndexMatrix A = random_hermitian(n, rng);
    IndexMatrix M = random_hermitian(n, rng, 0.5);
    std::vector<double> pooled = hermitian_spectrum(A);
    std::vector<double> eb = hermitian_spectrum(A.plus(M));
    pooled.insert(pooled.end(), eb.begin(), eb.end());
    std::sort(pooled.begin(), pooled.end());
    for (size_t i = 0; i + 1 < pooled.size(); ++i) {
      if (pooled[i + 1] - pooled[i] < 1e-2) continue;
      double a = pooled[i], b = pooled[i + 1];
      int base = xi(a + (b - a) * 0.25, A, M);
      CHECK(xi(a + (b - a) * 0.5, A, M) == base);
      CHECK(xi(a + (b - a) * 0.75, A, M) == base);
    }
  }
}

TEST_CASE("validation rejects malformed inputs") {
  IndexMatrix half = IndexMatrix::diagonal({0.5, 0.0});
  IndexMatrix ok = IndexMatrix::diagonal({1.0, 0.0});
  CHECK_THROWS_AS(index_pair(ProjectionPair{half, ok}),
                  std::invalid_argument);

  ProjectionPair mismatch{IndexMatrix::identity(2), IndexMatrix::identity(3)};
  CHECK_THROWS_AS(index_pair(mismatch), std::invalid_argument);

  IndexMatrix skew = IndexMatrix::zero(2);
  skew.set(0, 1, {1.0, 0.0});
  CHECK_THROWS_AS(xi(0.5, skew, IndexMatrix::zero(2)),
                  std::invalid_argument);

  // Inadmissible lambda sits on an eigenvalue.
  IndexMatrix A = IndexMatrix::diagonal({0.0, 2.0});
  CHECK_THROWS_AS(xi(0.0, A, IndexMatrix::zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(verify_interval_counts(A, IndexMatrix::zero(2), 1.0, 1.0),
                  std::invalid_argument);
}
