// SPDX-License-Identifier: Apache-2.0
//
// Truncated spinor matrices for the free and perturbed operator, their
// spectra through the exact angular block decomposition, eigenvalue counts
// in windows around a chosen level, and the two counting experiments that
// compare those counts against the compressed single-level forms.

#pragma once

#include "ldk/bigfloat.hpp"
#include "ldk/fock.hpp"
#include "ldk/profiles.hpp"
#include "ldk/toeplitz.hpp"

#include <string>
#include <vector>

namespace ldk {

// One basis spinor: (phi_{k,n}, 0) for the upper component, (0, phi_{k,n})
// for the lower.  The ladder couples upper (k, n+1) with lower (k, n).
struct SpinorIndex {
  enum class Component { upper, lower };
  Component component{Component::upper};
  int k{0};
  int n{0};
};

// Conserved angular index: k - n on the upper component, k - n - 1 on the
// lower.  The ladder and any radial diagonal potential preserve it, so the
// assembled matrices are block diagonal over this value.
int angular_index(const SpinorIndex& s);

struct TruncationSpec {
  int K{20};  // seed cutoff: k <= K in both components
  int N{2};   // level cutoff: upper n <= N, lower n <= N - 1
  void validate() const;
};

// Row order of the assembled matrices: angular blocks by increasing index,
// uppers before lowers inside a block, each side by increasing n.  Lowers
// stop at N - 1 so every lower has its raised partner present; the free
// spectrum is then exactly {m} + {+-sqrt(2bn + m^2): 1 <= n <= N}, each
// value with multiplicity K + 1.
std::vector<SpinorIndex> spinor_basis(const TruncationSpec& t);

// Quarter of the distance to the nearer adjacent level.
Real default_window(int q, const MagneticParams& p);

// Diagonal m, -m plus the pairing entries sqrt(2b(n+1)).  Exact entries, so
// the eigenvalues are the reachable levels to eigensolver accuracy.
HermitianMatrix assemble_free_dirac(const MagneticParams& p,
                                    const TruncationSpec& t);

// Free matrix plus the multiplication operator of a diagonal potential.
// Radial components are assembled from one shared moment table per
// component (exact for steps); a Grid2D component couples every index pair
// inside its component by 2-D quadrature, at quadratic cost in the basis
// size.  An anti-diagonal W is rejected here: in this toolkit it is treated
// by the compressed level forms only.
HermitianMatrix assemble_perturbed_dirac(const MagneticParams& p,
                                         const PotentialSpec& V,
                                         const TruncationSpec& t,
                                         const QuadControl& qc = QuadControl{});

// Eigenvalues of an assembled spinor matrix.  When every cross-block entry
// is an exact zero the blocks are diagonalized independently, concurrently;
// any nonzero cross-block coupling falls back to one full decomposition.
Spectrum dirac_spectrum(const HermitianMatrix& H, const TruncationSpec& t,
                        unsigned bits = 0);

// Eigenvalues inside (mu_q - window, mu_q + window), split by side.
// Members within cluster_margin of mu_q form the unperturbed cluster: at
// finite truncation the level itself splits into a near-degenerate bundle
// that the eigensolver cannot certify away from mu_q, so those are counted
// separately and excluded from both sides.
struct LevelWindow {
  int q{0};
  Real mu{0};
  Real window{0};
  Real cluster_margin{0};
  int cluster_size{0};
  std::vector<Real> above;  // ascending, inside (mu + margin, mu + window)
  std::vector<Real> below;  // descending, inside (mu - window, mu - margin)

  // Window counts beyond mu_q +- lambda; lambda must lie in (0, window).
  int count_above(const Real& lambda) const;
  int count_below(const Real& lambda) const;
};

// cluster_margin = 0 derives 10 * zero_cutoff * (1 + |mu_q|); the value used
// is reported back.  Throws when the window reaches the midpoint to an
// adjacent level.
LevelWindow eigen_near_level(const Spectrum& spec, int q, const Real& window,
                             const MagneticParams& p,
                             const Real& cluster_margin = Real(0));
// Convenience overload: one full decomposition of H first.
LevelWindow eigen_near_level(const HermitianMatrix& H, int q,
                             const Real& window, const MagneticParams& p,
                             const Real& cluster_margin = Real(0));

// One lambda row of the bracket comparison around level q.  The d_* fields
// are window counts minus the matching compressed counts; the sandwich
// property at finite truncation is that all of them stay near zero
// uniformly over the grid.
struct SandwichCounts {
  Real lambda{0};
  int n_plus{0};        // window count above mu_q + lambda at K
  int n_minus{0};       // window count below mu_q - lambda at K
  int n_plus_check{0};  // the same counts at K + 10
  int n_minus_check{0};
  int t_plus_lo{0};   // n_+(lambda) of the compressed form of V - eps|V|
  int t_plus_hi{0};   // ... and of V + eps|V|
  int t_minus_lo{0};  // n_-(lambda) of V + eps|V|
  int t_minus_hi{0};  // ... and of V - eps|V|
  int d_plus_lo{0};   // n_plus - t_plus_lo, expected bounded below
  int d_plus_hi{0};   // n_plus - t_plus_hi, expected bounded above
  int d_minus_lo{0};
  int d_minus_hi{0};
  bool stable{false};  // both window counts moved by at most 1 at K + 10
};

struct DiagSandwichReport {
  int q{0};
  Real eps{0};
  Real window{0};
  Real cluster_margin{0};
  int K{0};
  int K_check{0};
  std::vector<SandwichCounts> rows;
  int max_abs_defect{0};
  bool counts_stable{false};  // every row stable
};

// Counts around level q for the perturbed matrix against the compressed
// eps-bracket forms, over a grid of lambda offsets in (0, window).  The
// window is the default for q; every count is recomputed at K + 10 per the
// pollution control, and disagreements beyond +-1 are flagged, not averaged.
DiagSandwichReport verify_diag_sandwich(const PotentialSpec& V, int q,
                                        const Real& eps,
                                        const std::vector<Real>& lambda_grid,
                                        const TruncationSpec& t,
                                        const MagneticParams& p,
                                        const QuadControl& qc = QuadControl{});

struct AccumulationRow {
  int K{0};
  int mu0_count{0};    // eigenvalues in (mu_0 + margin, mu_0 + window)
  int mu0_cluster{0};
  int mu1_count{0};    // eigenvalues in (mu_1 + margin, mu_1 + window)
  int mu1_below{0};    // eigenvalues in (mu_1 - window, mu_1 - margin)
  int mu1_probe_above{0};  // counts at the fixed distance probe from mu_1
  int mu1_probe_below{0};
  int mu1_cluster{0};
};

struct AccumulationReport {
  int branch{0};
  Real eps{0};
  Real window{0};
  Real probe{0};
  int N{0};
  std::string v2_descriptor;
  std::vector<AccumulationRow> rows;  // one per truncation, increasing K
  bool mu0_strictly_increasing{false};
  int mu1_count_max{0};    // largest window count above mu_1
  int mu1_probe_spread{0};  // max - min of the probe totals across K
};

// Builds the second diagonal component from v1 (branch 1: the suppressing
// profile; branch 2: the cancelling profile at the given eps), assembles the
// perturbed matrix at each truncation in K_list (empty: {K-20, K-10, K}
// clipped to >= 1), and reports the window counts at mu_0 and mu_1 plus the
// fixed-distance counts at mu_1.  The window counts carry the branch-1
// statement (growth at mu_0, emptiness above mu_1).  For branch 2 the
// full-window count below mu_1 grows with the multiplicity at any finite
// truncation, so the bounded-count statement is read off the fixed-distance
// counts, which are the counting functions the bracket argument controls.
// window = 0 derives the smaller of the two level defaults; probe defaults
// to window / 4.
AccumulationReport accumulation_experiment(const SmoothRadial& v1, int branch,
                                  const Real& eps, const TruncationSpec& t,
                                  const MagneticParams& p,
                                  std::vector<int> K_list = {},
                                  Real window = Real(0), Real probe = Real(0),
                                  const QuadControl& qc = {});

}  // namespace ldk
