// SPDX-License-Identifier: Apache-2.0
//
// Dense Hermitian matrices over the big-float scalars, their eigenvalues by
// cyclic Jacobi rotations, and the truncated Toeplitz assemblies built from
// the angular momentum basis.

#pragma once

#include "ldk/bigfloat.hpp"
#include "ldk/fock.hpp"
#include "ldk/profiles.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ldk {

struct HermitianMatrix {
  int dim{0};
  std::vector<Complex> a;  // row-major
  std::string descriptor;

  static HermitianMatrix zero(int dim, std::string descriptor = {});

  const Complex& at(int i, int j) const { return a[idx(i, j)]; }
  // Writes (i,j) and its conjugate mirror; diagonal writes must be real.
  void set(int i, int j, const Complex& v);
  // dst += factor * src entrywise; descriptors are the caller's business.
  void add_scaled(const HermitianMatrix& src, const Real& factor);

  Real trace() const;
  Real frobenius() const;
  Real offdiag_frobenius() const;
  bool same_entries(const HermitianMatrix& o) const;  // bitwise equality

  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) * dim + j;
  }
};

struct Spectrum {
  std::vector<Real> values;  // sorted descending
  unsigned precision_bits_used{0};
  Real zero_cutoff{0};  // eigenvalues within this of 0 are "numerically zero"
  std::string provenance;

  // nu_k^+: positive eigenvalues above the cutoff, non-increasing.
  std::vector<Real> positive() const;
  // nu_k^-: negative eigenvalues below -cutoff, non-decreasing.
  std::vector<Real> negative() const;
};

// All eigenvalues via cyclic Jacobi.  The rotation skip rule is relative to
// the paired diagonal entries, so tiny eigenvalues are resolved to full
// working precision rather than to a norm-wide absolute floor.  Fails if the
// off-diagonal Frobenius mass is not below 2^{-bits/2} * ||H||_F after the
// sweep cap.
Spectrum hermitian_eigenvalues(const HermitianMatrix& H, unsigned bits = 0);

// (K+1) x (K+1) matrix of <phi_{j,n}, v phi_{k,n}>, j,k <= K.  Radial v
// makes the matrix exactly diagonal (angular selection); Grid2D assembles
// every entry by quadrature.
HermitianMatrix assemble_landau_toeplitz(int n, const Profile& v, int K,
                                         const MagneticParams& p,
                                         const QuadControl& qc = QuadControl{});

// The level-q perturbation matrix of the Dirac operator:
//   q = 0:  M^(0)(V1)
//   q > 0:  t_q M^(q)(V1) + (1-t_q) M^(q-1)(V2) + ladder-coupled W block
//   q < 0:  t_q M^(|q|-1)(V2) + (1-t_q) M^(|q|)(V1) + mirrored W block
// where M^(n) is assemble_landau_toeplitz at level n.  The W block carries
// 1/(2 mu_q), so its sign follows the sign of q.
HermitianMatrix assemble_dirac_toeplitz(int q, const PotentialSpec& V, int K,
                                        const MagneticParams& p,
                                        const QuadControl& qc = QuadControl{});

// n_+(s) / n_-(s): eigenvalues beyond +-s, multiplicity counted.  s > 0.
int counting(const Real& s, const Spectrum& spec, int sign);

// Componentwise V +- eps|V| for diagonal V; W present is unsupported.
std::pair<PotentialSpec, PotentialSpec> epsilon_bracket(const PotentialSpec& V,
                                                        const Real& eps);

// <f, W g> for a complex multiplier, by midpoint tensor quadrature over the
// square box covering the field's support.
Complex field_matrix_element(const ComplexField& w, const LadderFunction& f,
                             const LadderFunction& g,
                             const QuadControl& qc = QuadControl{});

}  // namespace ldk
