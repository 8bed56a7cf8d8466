// SPDX-License-Identifier: Apache-2.0

#include "ldk/indexpair.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ldk {

namespace {

using EMat = Eigen::MatrixXcd;

EMat to_eigen(const IndexMatrix& m) {
  EMat out(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = 0; j < m.dim; ++j) out(i, j) = m.at(i, j);
  return out;
}

IndexMatrix from_eigen(const EMat& m) {
  IndexMatrix out = IndexMatrix::zero(int(m.rows()));
  for (int i = 0; i < out.dim; ++i)
    for (int j = 0; j < out.dim; ++j) out.set(i, j, m(i, j));
  return out;
}

void require_hermitian(const IndexMatrix& m, const char* who) {
  double scale = 1.0;
  for (const auto& v : m.a) scale = std::max(scale, std::abs(v));
  if (m.hermiticity_error() > 1e-10 * scale)
    throw std::invalid_argument(std::string(who) + " must be Hermitian");
}

Eigen::SelfAdjointEigenSolver<EMat> decompose(const IndexMatrix& m,
                                              const char* who) {
  require_hermitian(m, who);
  Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(m));
  if (es.info() != Eigen::Success)
    throw RankFailure(std::string("eigendecomposition failed for ") + who);
  return es;
}

double spectral_scale(const Eigen::VectorXd& evals) {
  double s = 0;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    s = std::max(s, std::abs(evals[i]));
  return s;
}

void require_admissible(const Eigen::VectorXd& evals, double lambda,
                        const char* who) {
  double tol = std::max(rank_threshold(int(evals.size()),
                                       std::max(spectral_scale(evals), 1.0)),
                        1e-9 * (1.0 + std::abs(lambda)));
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (std::abs(evals[i] - lambda) <= tol)
      throw std::invalid_argument(std::string("lambda is too close to an "
                                              "eigenvalue of ") +
                                  who);
}

int count_below(const Eigen::VectorXd& evals, double lambda) {
  int c = 0;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (evals[i] < lambda) ++c;
  return c;
}

// Columns spanning the eigenspace of a projection for eigenvalues near 1
// (range) or near 0 (kernel).  Eigenvalues away from both are rank failures.
EMat projector_half(const Eigen::SelfAdjointEigenSolver<EMat>& es,
                    bool range) {
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::vector<int> cols;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i] - 1.0) > 0.1 && std::abs(ev[i]) > 0.1)
      throw RankFailure("projection eigenvalue far from 0 and 1");
    if ((ev[i] > 0.5) == range) cols.push_back(int(i));
  }
  EMat out(ev.size(), cols.size());
  for (size_t j = 0; j < cols.size(); ++j)
    out.col(Eigen::Index(j)) = es.eigenvectors().col(cols[j]);
  return out;
}

int rank_of(const EMat& m, double scale) {
  if (m.cols() == 0 || m.rows() == 0) return 0;
  Eigen::JacobiSVD<EMat> svd(m);
  double thr = rank_threshold(int(std::max(m.rows(), m.cols())),
                              std::max(scale, svd.singularValues()[0]));
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > thr) ++r;
  return r;
}

// dim(span U meet span V) for orthonormal column blocks.
int intersection_dim(const EMat& U, const EMat& V) {
  if (U.cols() == 0 || V.cols() == 0) return 0;
  EMat joint(U.rows(), U.cols() + V.cols());
  joint << U, V;
  return int(U.cols() + V.cols()) - rank_of(joint, 1.0);
}

}  // namespace

IndexMatrix IndexMatrix::zero(int n) {
  IndexMatrix m;
  m.dim = n;
  m.a.assign(size_t(n) * n, {0.0, 0.0});
  return m;
}

IndexMatrix IndexMatrix::identity(int n) {
  IndexMatrix m = zero(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

IndexMatrix IndexMatrix::diagonal(const std::vector<double>& d) {
  IndexMatrix m = zero(int(d.size()));
  for (int i = 0; i < m.dim; ++i) m.set(i, i, d[size_t(i)]);
  return m;
}

IndexMatrix IndexMatrix::plus(const IndexMatrix& other) const {
  if (dim != other.dim)
    throw std::invalid_argument("matrix dimensions differ");
  IndexMatrix out = *this;
  for (size_t i = 0; i < a.size(); ++i) out.a[i] += other.a[i];
  return out;
}

double IndexMatrix::hermiticity_error() const {
  double e = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      e = std::max(e, std::abs(at(i, j) - std::conj(at(j, i))));
  return e;
}

double rank_threshold(int dim, double scale) {
  return dim * std::numeric_limits<double>::epsilon() * scale;
}

std::vector<double> hermitian_spectrum(const IndexMatrix& A) {
  auto es = decompose(A, "the operator");
  return {es.eigenvalues().data(),
          es.eigenvalues().data() + es.eigenvalues().size()};
}

IndexMatrix spectral_projector_below(const IndexMatrix& A, double lambda,
                                     double gap_tol) {
  auto es = decompose(A, "the operator");
  if (gap_tol > 0) require_admissible(es.eigenvalues(), lambda, "the operator");
  EMat acc = EMat::Zero(A.dim, A.dim);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] < lambda)
      acc += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return from_eigen(acc);
}

void ProjectionPair::validate(double tol) const {
  if (P.dim != Q.dim || P.dim <= 0)
    throw std::invalid_argument("projections must share a positive dimension");
  for (const IndexMatrix* m : {&P, &Q}) {
    if (m->hermiticity_error() > tol)
      throw std::invalid_argument("projection is not Hermitian");
    EMat e = to_eigen(*m);
    if ((e * e - e).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("projection is not idempotent");
  }
}

int index_pair(const ProjectionPair& pp) {
  pp.validate();

  std::complex<double> tr = 0;
  for (int i = 0; i < pp.P.dim; ++i) tr += pp.P.at(i, i) - pp.Q.at(i, i);
  double rounded = std::round(tr.real());
  if (std::abs(tr.real() - rounded) > 1e-6 || std::abs(tr.imag()) > 1e-6)
    throw RankFailure("trace of P - Q is not near an integer");
  int by_trace = int(rounded);

  // Kernel route: dim(Ran P meet Ker Q) - dim(Ker P meet Ran Q).
  auto ep = decompose(pp.P, "P");
  auto eq = decompose(pp.Q, "Q");
  int forward = intersection_dim(projector_half(ep, true),
                                 projector_half(eq, false));
  int backward = intersection_dim(projector_half(ep, false),
                                  projector_half(eq, true));
  if (forward - backward != by_trace)
    throw RankFailure("trace and kernel-dimension paths disagree");
  return by_trace;
}

int xi(double lambda, const IndexMatrix& A, const IndexMatrix& M) {
  IndexMatrix B = A.plus(M);
  auto ea = decompose(A, "A");
  auto eb = decompose(B, "A + M");
  require_admissible(ea.eigenvalues(), lambda, "A");
  require_admissible(eb.eigenvalues(), lambda, "A + M");

  ProjectionPair pp{spectral_projector_below(A, lambda),
                    spectral_projector_below(B, lambda)};
  int idx = index_pair(pp);
  // The pair route must reproduce the counting difference.
  if (idx != count_below(ea.eigenvalues(), lambda) -
                 count_below(eb.eigenvalues(), lambda))
    throw RankFailure("projection index deviates from the counting difference");
  return idx;
}

IntervalCountReport verify_interval_counts(const IndexMatrix& A, const IndexMatrix& M,
                                double lambda1, double lambda2) {
  if (!(lambda1 < lambda2))
    throw std::invalid_argument("interval endpoints must be ordered");
  IndexMatrix B = A.plus(M);
  auto ea = decompose(A, "A");
  auto eb = decompose(B, "A + M");

  IntervalCountReport rep;
  rep.xi_lo = xi(lambda1, A, M);
  rep.xi_hi = xi(lambda2, A, M);
  rep.count_B = count_below(eb.eigenvalues(), lambda2) -
                count_below(eb.eigenvalues(), lambda1);
  rep.count_A = count_below(ea.eigenvalues(), lambda2) -
                count_below(ea.eigenvalues(), lambda1);
  rep.holds = (rep.xi_lo - rep.xi_hi) == (rep.count_B - rep.count_A);
  return rep;
}

RankBoundReport verify_rank_bounds(const IndexMatrix& A, const IndexMatrix& M,
                                   double lambda) {
  auto em = decompose(M, "M");
  double thr = rank_threshold(M.dim, std::max(spectral_scale(em.eigenvalues()),
                                              1.0));
  RankBoundReport rep;
  rep.xi_value = xi(lambda, A, M);
  for (Eigen::Index i = 0; i < em.eigenvalues().size(); ++i) {
    if (em.eigenvalues()[i] > thr) ++rep.rank_plus;
    if (em.eigenvalues()[i] < -thr) ++rep.rank_minus;
  }
  rep.holds = -rep.rank_minus <= rep.xi_value && rep.xi_value <= rep.rank_plus;
  return rep;
}

MonotonicityReport verify_monotonicity(const IndexMatrix& A,
                                       const IndexMatrix& M1,
                                       const IndexMatrix& M2, double lambda) {
  IndexMatrix D = M1;
  for (size_t i = 0; i < D.a.size(); ++i) D.a[i] -= M2.a[i];
  auto ed = decompose(D, "M1 - M2");
  double thr = rank_threshold(D.dim, std::max(spectral_scale(ed.eigenvalues()),
                                              1.0));
  if (ed.eigenvalues()[0] < -thr)
    throw std::invalid_argument("M1 - M2 must be positive semidefinite");

  MonotonicityReport rep;
  rep.xi_1 = xi(lambda, A, M1);
  rep.xi_2 = xi(lambda, A, M2);
  rep.monotone = rep.xi_1 >= rep.xi_2;

  IndexMatrix P = spectral_projector_below(A, lambda);
  IndexMatrix Q = spectral_projector_below(A.plus(M2), lambda);
  IndexMatrix R = spectral_projector_below(A.plus(M1), lambda);
  rep.chain_direct = index_pair(ProjectionPair{P, R});
  rep.chain_split =
      index_pair(ProjectionPair{P, Q}) + index_pair(ProjectionPair{Q, R});
  rep.additive = rep.chain_direct == rep.chain_split;
  rep.holds = rep.monotone && rep.additive;
  return rep;
}

}  // namespace ldk
