// SPDX-License-Identifier: Apache-2.0
//
// Index of a pair of orthogonal projections and the spectral-flow count
// Xi(lambda) = N_A(lambda) - N_{A+M}(lambda), with the integer identities
// (interval counting, rank bounds, monotonicity, additivity) as checkable
// reports.  Everything here is double precision; in finite dimension the
// index is an exact integer and the only failure mode is numerical rank
// ambiguity, which is surfaced, never rounded away.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldk {

// Thrown when a trace refuses to sit near an integer or the two index
// computation paths disagree: the input is rank-unstable at this precision.
struct RankFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense complex matrix, row major.  Hermiticity is a property of the values,
// checked by the consumers that require it.
struct IndexMatrix {
  int dim{0};
  std::vector<std::complex<double>> a;

  static IndexMatrix zero(int n);
  static IndexMatrix identity(int n);
  static IndexMatrix diagonal(const std::vector<double>& d);

  std::complex<double> at(int i, int j) const { return a[size_t(i) * dim + j]; }
  void set(int i, int j, std::complex<double> v) { a[size_t(i) * dim + j] = v; }

  IndexMatrix plus(const IndexMatrix& other) const;
  double hermiticity_error() const;  // max |a_ij - conj(a_ji)|
};

// Rank decision threshold: dim * machine epsilon * scale.
double rank_threshold(int dim, double scale);

// Ascending eigenvalues of a Hermitian matrix.
std::vector<double> hermitian_spectrum(const IndexMatrix& A);

// Orthogonal projector onto the span of eigenvectors with eigenvalue below
// lambda.  lambda must keep a gap of at least gap_tol to the spectrum.
IndexMatrix spectral_projector_below(const IndexMatrix& A, double lambda,
                                     double gap_tol = 0);

struct ProjectionPair {
  IndexMatrix P;
  IndexMatrix Q;
  // Hermitian and idempotent within tol; equal dimensions.
  void validate(double tol = 1e-8) const;
};

// Index(P, Q), computed two independent ways: the rounded trace of P - Q,
// and dim(Ran P meet Ker Q) - dim(Ker P meet Ran Q) through numerical ranks.
// Throws RankFailure when the trace strays from an integer by more than
// 1e-6 or the two paths disagree.
int index_pair(const ProjectionPair& pp);

// Index of the below-lambda spectral projections of A and B = A + M, equal
// to N_A(lambda) - N_B(lambda).  lambda must be admissible: separated from
// the spectra of both A and B.
int xi(double lambda, const IndexMatrix& A, const IndexMatrix& M);

// Xi(lambda1) - Xi(lambda2) against the eigenvalue counts of B and A inside
// [lambda1, lambda2); the two integers must match exactly.
struct IntervalCountReport {
  int xi_lo{0};
  int xi_hi{0};
  int count_B{0};
  int count_A{0};
  bool holds{false};
};
IntervalCountReport verify_interval_counts(const IndexMatrix& A, const IndexMatrix& M,
                                double lambda1, double lambda2);

// -rank(M_-) <= Xi <= rank(M_+), the parts taken spectrally.
struct RankBoundReport {
  int xi_value{0};
  int rank_plus{0};
  int rank_minus{0};
  bool holds{false};
};
RankBoundReport verify_rank_bounds(const IndexMatrix& A, const IndexMatrix& M,
                                   double lambda);

// M1 >= M2 forces Xi(lambda; M1) >= Xi(lambda; M2); the three spectral
// projections involved must also chain additively:
// Index(E_A, E_{A+M1}) = Index(E_A, E_{A+M2}) + Index(E_{A+M2}, E_{A+M1}).
struct MonotonicityReport {
  int xi_1{0};
  int xi_2{0};
  int chain_direct{0};
  int chain_split{0};
  bool monotone{false};
  bool additive{false};
  bool holds{false};
};
MonotonicityReport verify_monotonicity(const IndexMatrix& A,
                                       const IndexMatrix& M1,
                                       const IndexMatrix& M2, double lambda);

}  // namespace ldk
