// SPDX-License-Identifier: Apache-2.0

#include "ldk/dirac.hpp"

#include "ldk/effective.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>
#include <tuple>

namespace ldk {

namespace {

// Work queue over [0, njobs).  Workers must not touch global precision or
// any lazily built shared cache; every job here is pure arithmetic over
// state frozen before the spawn.
void parallel_for(int njobs, const std::function<void(int)>& body) {
  if (njobs <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int workers = std::min(njobs, hw > 0 ? static_cast<int>(hw) : 1);
  if (workers <= 1) {
    for (int i = 0; i < njobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          int i = next.fetch_add(1);
          if (i >= njobs) break;
          body(i);
        }
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// Same monomial pairing as the exact inner product, against a precomputed
// moment table of the radial multiplier.
Complex element_from_moments(const LadderFunction& f, const LadderFunction& g,
                             const std::vector<Real>& mom) {
  Complex acc;
  for (const auto& [ij1, c1] : f.coeffs)
    for (const auto& [ij2, c2] : g.coeffs) {
      if (ij1.first + ij2.second != ij1.second + ij2.first) continue;
      acc += conj(c1) * c2 * mom[ij1.first + ij2.second];
    }
  return acc;
}

}  // namespace

int angular_index(const SpinorIndex& s) {
  return s.component == SpinorIndex::Component::upper ? s.k - s.n
                                                      : s.k - s.n - 1;
}

void TruncationSpec::validate() const {
  if (K < 1) throw ConfigError("truncation K must be at least 1");
  if (N < 1) throw ConfigError("level cutoff N must be at least 1");
}

std::vector<SpinorIndex> spinor_basis(const TruncationSpec& t) {
  t.validate();
  std::vector<SpinorIndex> out;
  out.reserve(static_cast<size_t>(t.K + 1) * (2 * t.N + 1));
  for (int j = -t.N; j <= t.K; ++j) {
    for (int n = std::max(0, -j); n <= std::min(t.N, t.K - j); ++n)
      out.push_back({SpinorIndex::Component::upper, j + n, n});
    for (int n = std::max(0, -j - 1); n <= std::min(t.N - 1, t.K - j - 1); ++n)
      out.push_back({SpinorIndex::Component::lower, j + 1 + n, n});
  }
  return out;
}

Real default_window(int q, const MagneticParams& p) {
  p.validate();
  Real mu = landau_dirac_level(q, p);
  Real up = landau_dirac_level(q + 1, p) - mu;
  Real dn = mu - landau_dirac_level(q - 1, p);
  return (up < dn ? up : dn) / 4;
}

HermitianMatrix assemble_free_dirac(const MagneticParams& p,
                                    const TruncationSpec& t) {
  p.validate();
  std::vector<SpinorIndex> basis = spinor_basis(t);
  const int dim = static_cast<int>(basis.size());
  HermitianMatrix H = HermitianMatrix::zero(
      dim, "dirac_free K=" + std::to_string(t.K) + " N=" + std::to_string(t.N));

  std::map<std::tuple<int, int, int>, int> row;
  for (int i = 0; i < dim; ++i)
    row[{static_cast<int>(basis[i].component), basis[i].k, basis[i].n}] = i;

  for (int i = 0; i < dim; ++i) {
    const SpinorIndex& s = basis[i];
    bool upper = s.component == SpinorIndex::Component::upper;
    H.set(i, i, Complex(upper ? p.m : -p.m));
    if (upper && s.n >= 1) {
      // <phi_{k,n}, a* phi_{k,n-1}> = sqrt(2bn); the partner is always in
      // the truncation because lowers run to N - 1.
      auto it = row.find({static_cast<int>(SpinorIndex::Component::lower), s.k,
                          s.n - 1});
      if (it == row.end())
        throw NumericalFailure("pairing partner missing from the basis");
      H.set(i, it->second, Complex(sqrt(2 * p.b * s.n)));
    }
  }
  return H;
}

HermitianMatrix assemble_perturbed_dirac(const MagneticParams& p,
                                         const PotentialSpec& V,
                                         const TruncationSpec& t,
                                         const QuadControl& qc) {
  p.validate();
  if (V.w)
    throw ConfigError(
        "anti-diagonal coupling is not part of the full spinor assembly; "
        "analyze it through the compressed level forms");

  HermitianMatrix H = assemble_free_dirac(p, t);
  H.descriptor = "dirac_perturbed K=" + std::to_string(t.K) +
                 " N=" + std::to_string(t.N);
  std::vector<SpinorIndex> basis = spinor_basis(t);

  for (int comp = 0; comp < 2; ++comp) {
    const Profile& v = comp == 0 ? V.v1 : V.v2;
    // Empty support is the zero multiplier: nothing to add.
    if (!(profile_support_radius(v) > 0)) continue;

    std::vector<int> rows;
    for (int i = 0; i < static_cast<int>(basis.size()); ++i) {
      bool upper = basis[i].component == SpinorIndex::Component::upper;
      if (upper == (comp == 0)) rows.push_back(i);
    }
    std::vector<LadderFunction> funcs(rows.size());
    for (size_t r = 0; r < rows.size(); ++r)
      funcs[r] =
          build_basis_function({basis[rows[r]].k, basis[rows[r]].n}, p);

    if (is_radial(v)) {
      int max_i = 0, max_j = 0;
      for (const auto& f : funcs)
        for (const auto& [ij, c] : f.coeffs) {
          max_i = std::max(max_i, ij.first);
          max_j = std::max(max_j, ij.second);
        }
      // One moment table serves every entry of this component.
      std::vector<Real> mom = radial_moments(v, p.b, max_i + max_j);

      // A radial multiplier only couples equal angular momentum k - n.
      std::map<int, std::vector<int>> groups;
      for (size_t r = 0; r < rows.size(); ++r)
        groups[basis[rows[r]].k - basis[rows[r]].n].push_back(
            static_cast<int>(r));
      std::vector<const std::vector<int>*> glist;
      glist.reserve(groups.size());
      for (const auto& [ell, g] : groups) glist.push_back(&g);

      // Distinct groups touch disjoint matrix cells.
      parallel_for(static_cast<int>(glist.size()), [&](int gi) {
        const std::vector<int>& g = *glist[gi];
        for (size_t a = 0; a < g.size(); ++a)
          for (size_t c = a; c < g.size(); ++c) {
            Complex e = element_from_moments(funcs[g[a]], funcs[g[c]], mom);
            int r1 = rows[g[a]], r2 = rows[g[c]];
            Complex upd = H.at(r1, r2) + e;
            if (r1 == r2) upd = Complex(upd.re);
            H.set(r1, r2, upd);
          }
      });
    } else {
      // No angular selection: every pair inside the component, each by 2-D
      // quadrature.  Quadratic in the basis size by necessity.
      std::vector<std::pair<int, int>> pairs;
      for (size_t a = 0; a < rows.size(); ++a)
        for (size_t c = a; c < rows.size(); ++c)
          pairs.emplace_back(static_cast<int>(a), static_cast<int>(c));
      parallel_for(static_cast<int>(pairs.size()), [&](int pi) {
        auto [a, c] = pairs[pi];
        Complex e = matrix_element(v, funcs[a], funcs[c], 0, nullptr, qc);
        int r1 = rows[a], r2 = rows[c];
        Complex upd = H.at(r1, r2) + e;
        if (r1 == r2) upd = Complex(upd.re);
        H.set(r1, r2, upd);
      });
    }
  }
  return H;
}

Spectrum dirac_spectrum(const HermitianMatrix& H, const TruncationSpec& t,
                        unsigned bits) {
  PrecisionGuard guard(bits);
  std::vector<SpinorIndex> basis = spinor_basis(t);
  if (static_cast<int>(basis.size()) != H.dim)
    throw ConfigError("matrix dimension does not match the truncation");

  std::vector<int> bid(H.dim);
  for (int i = 0; i < H.dim; ++i) bid[i] = angular_index(basis[i]);

  for (int i = 0; i < H.dim; ++i)
    for (int j = i + 1; j < H.dim; ++j)
      if (bid[i] != bid[j] && !H.at(i, j).is_zero()) {
        // Cross-block coupling present (nonradial potential): one full
        // decomposition instead of the block route.
        return hermitian_eigenvalues(H, 0);
      }

  std::map<int, std::vector<int>> blocks;
  for (int i = 0; i < H.dim; ++i) blocks[bid[i]].push_back(i);
  std::vector<const std::vector<int>*> blist;
  blist.reserve(blocks.size());
  for (const auto& [j, rows] : blocks) blist.push_back(&rows);

  std::vector<std::vector<Real>> vals(blist.size());
  parallel_for(static_cast<int>(blist.size()), [&](int bi) {
    const std::vector<int>& rows = *blist[bi];
    const int d = static_cast<int>(rows.size());
    HermitianMatrix sub = HermitianMatrix::zero(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) sub.a[sub.idx(i, j)] = H.at(rows[i], rows[j]);
    Spectrum s = hermitian_eigenvalues(sub, 0);
    vals[bi] = std::move(s.values);
  });

  Spectrum spec;
  spec.precision_bits_used = precision_bits();
  spec.zero_cutoff = numeric_zero_cutoff();
  for (const auto& v : vals) spec.values.insert(spec.values.end(), v.begin(), v.end());
  std::sort(spec.values.begin(), spec.values.end(),
            [](const Real& x, const Real& y) { return x > y; });
  spec.provenance = H.descriptor + " | block jacobi blocks=" +
                    std::to_string(blist.size()) +
                    " bits=" + std::to_string(spec.precision_bits_used);
  return spec;
}

int LevelWindow::count_above(const Real& lambda) const {
  if (!(lambda > 0) || !(lambda < window))
    throw ConfigError("lambda must lie inside (0, window)");
  int c = 0;
  for (const Real& e : above)
    if (e > mu + lambda) ++c;
  return c;
}

int LevelWindow::count_below(const Real& lambda) const {
  if (!(lambda > 0) || !(lambda < window))
    throw ConfigError("lambda must lie inside (0, window)");
  int c = 0;
  for (const Real& e : below)
    if (e < mu - lambda) ++c;
  return c;
}

LevelWindow eigen_near_level(const Spectrum& spec, int q, const Real& window,
                             const MagneticParams& p,
                             const Real& cluster_margin) {
  p.validate();
  Real mu = landau_dirac_level(q, p);
  Real up = landau_dirac_level(q + 1, p) - mu;
  Real dn = mu - landau_dirac_level(q - 1, p);
  Real halfgap = (up < dn ? up : dn) / 2;
  if (!(window > 0)) throw ConfigError("window must be positive");
  if (!(window < halfgap))
    throw ConfigError("window reaches the midpoint to an adjacent level");

  Real margin = cluster_margin;
  if (margin.is_zero()) margin = 10 * spec.zero_cutoff * (1 + abs(mu));
  if (!(margin > 0) || !(margin < window))
    throw ConfigError("cluster margin must lie in (0, window)");

  LevelWindow w;
  w.q = q;
  w.mu = mu;
  w.window = window;
  w.cluster_margin = margin;
  for (const Real& e : spec.values) {  // descending
    Real d = e - mu;
    if (abs(d) <= margin) {
      ++w.cluster_size;
      continue;
    }
    if (d > 0 && d < window) w.above.push_back(e);
    if (d < 0 && -d < window) w.below.push_back(e);
  }
  std::reverse(w.above.begin(), w.above.end());
  return w;
}

LevelWindow eigen_near_level(const HermitianMatrix& H, int q,
                             const Real& window, const MagneticParams& p,
                             const Real& cluster_margin) {
  return eigen_near_level(hermitian_eigenvalues(H), q, window, p,
                          cluster_margin);
}

DiagSandwichReport verify_diag_sandwich(const PotentialSpec& V, int q,
                                        const Real& eps,
                                        const std::vector<Real>& lambda_grid,
                                        const TruncationSpec& t,
                                        const MagneticParams& p,
                                        const QuadControl& qc) {
  t.validate();
  p.validate();
  if (std::abs(q) > t.N)
    throw ConfigError(
        "the level is not represented at this truncation; raise the level "
        "cutoff");
  if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");

  Real window = default_window(q, p);
  for (const Real& l : lambda_grid)
    if (!(l > 0) || !(l < window))
      throw ConfigError("lambda grid must lie inside (0, window)");

  auto [v_lo, v_hi] = epsilon_bracket(V, eps);
  Spectrum comp_lo =
      hermitian_eigenvalues(assemble_dirac_toeplitz(q, v_lo, t.K, p, qc));
  Spectrum comp_hi =
      hermitian_eigenvalues(assemble_dirac_toeplitz(q, v_hi, t.K, p, qc));

  DiagSandwichReport rep;
  rep.q = q;
  rep.eps = eps;
  rep.window = window;
  rep.K = t.K;
  rep.K_check = t.K + 10;

  TruncationSpec t2{t.K + 10, t.N};
  Spectrum s1 = dirac_spectrum(assemble_perturbed_dirac(p, V, t, qc), t);
  Spectrum s2 = dirac_spectrum(assemble_perturbed_dirac(p, V, t2, qc), t2);
  LevelWindow w1 = eigen_near_level(s1, q, window, p);
  LevelWindow w2 = eigen_near_level(s2, q, window, p);
  rep.cluster_margin = w1.cluster_margin;

  rep.counts_stable = true;
  for (const Real& l : lambda_grid) {
    SandwichCounts row;
    row.lambda = l;
    row.n_plus = w1.count_above(l);
    row.n_minus = w1.count_below(l);
    row.n_plus_check = w2.count_above(l);
    row.n_minus_check = w2.count_below(l);
    row.t_plus_lo = counting(l, comp_lo, +1);
    row.t_plus_hi = counting(l, comp_hi, +1);
    row.t_minus_lo = counting(l, comp_hi, -1);
    row.t_minus_hi = counting(l, comp_lo, -1);
    row.d_plus_lo = row.n_plus - row.t_plus_lo;
    row.d_plus_hi = row.n_plus - row.t_plus_hi;
    row.d_minus_lo = row.n_minus - row.t_minus_lo;
    row.d_minus_hi = row.n_minus - row.t_minus_hi;
    row.stable = std::abs(row.n_plus - row.n_plus_check) <= 1 &&
                 std::abs(row.n_minus - row.n_minus_check) <= 1;
    rep.counts_stable = rep.counts_stable && row.stable;
    for (int d : {row.d_plus_lo, row.d_plus_hi, row.d_minus_lo,
                  row.d_minus_hi})
      rep.max_abs_defect = std::max(rep.max_abs_defect, std::abs(d));
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

AccumulationReport accumulation_experiment(const SmoothRadial& v1, int branch,
                                  const Real& eps, const TruncationSpec& t,
                                  const MagneticParams& p,
                                  std::vector<int> K_list, Real window,
                                  Real probe, const QuadControl& qc) {
  t.validate();
  p.validate();
  if (branch != 1 && branch != 2)
    throw ConfigError("branch must be 1 (suppressing) or 2 (cancelling)");

  SmoothRadial v2 = branch == 1 ? suppressing_v2(v1, p)
                                : cancelling_v2(v1, eps, p);

  if (K_list.empty()) {
    for (int d : {20, 10, 0}) K_list.push_back(std::max(1, t.K - d));
  }
  std::sort(K_list.begin(), K_list.end());
  K_list.erase(std::unique(K_list.begin(), K_list.end()), K_list.end());
  if (K_list.front() < 1) throw ConfigError("truncation list entries must be >= 1");

  if (window.is_zero())
    window = std::min(default_window(0, p), default_window(1, p));
  if (probe.is_zero()) probe = window / 4;
  if (!(probe > 0) || !(probe < window))
    throw ConfigError("probe must lie inside (0, window)");

  AccumulationReport rep;
  rep.branch = branch;
  rep.eps = branch == 2 ? eps : Real(0);
  rep.window = window;
  rep.probe = probe;
  rep.N = t.N;
  rep.v2_descriptor = v2.descriptor;

  PotentialSpec V;
  V.v1 = v1;
  V.v2 = v2;

  bool increasing = true;
  int prev_mu0 = -1;
  int tot_min = 0, tot_max = 0;
  for (size_t i = 0; i < K_list.size(); ++i) {
    TruncationSpec tk{K_list[i], t.N};
    Spectrum s = dirac_spectrum(assemble_perturbed_dirac(p, V, tk, qc), tk);
    LevelWindow w0 = eigen_near_level(s, 0, window, p);
    LevelWindow w1 = eigen_near_level(s, 1, window, p);
    AccumulationRow row;
    row.K = K_list[i];
    row.mu0_count = static_cast<int>(w0.above.size());
    row.mu0_cluster = w0.cluster_size;
    row.mu1_count = static_cast<int>(w1.above.size());
    row.mu1_below = static_cast<int>(w1.below.size());
    row.mu1_probe_above = w1.count_above(probe);
    row.mu1_probe_below = w1.count_below(probe);
    row.mu1_cluster = w1.cluster_size;
    if (prev_mu0 >= 0 && row.mu0_count <= prev_mu0) increasing = false;
    prev_mu0 = row.mu0_count;
    rep.mu1_count_max = std::max(rep.mu1_count_max, row.mu1_count);
    int tot = row.mu1_probe_above + row.mu1_probe_below;
    if (i == 0) tot_min = tot_max = tot;
    tot_min = std::min(tot_min, tot);
    tot_max = std::max(tot_max, tot);
    rep.rows.push_back(row);
  }
  rep.mu0_strictly_increasing = increasing && rep.rows.size() >= 2;
  rep.mu1_probe_spread = tot_max - tot_min;
  return rep;
}

}  // namespace ldk
