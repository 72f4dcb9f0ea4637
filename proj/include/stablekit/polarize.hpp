#pragma once

#include <map>
#include <vector>

#include "stablekit/certify.hpp"
#include "stablekit/dense.hpp"
#include "stablekit/multiaffine.hpp"
#include "stablekit/roots.hpp"

namespace stablekit {

// Pol_m f: the symmetric multiaffine polynomial agreeing with f on the
// diagonal; x^j picks up e_j(x) / binom(m, j).
inline MultiAffinePoly polarize_uni(const DensePoly& f, int m) {
  require(f.arity() == 1, "polarize_uni: univariate input required");
  require(f.deg(0) <= m, "polarize_uni: degree exceeds m");
  require(m <= kMaxMultiAffineArity, "polarize_uni: arity cap");
  MultiAffinePoly out(m);
  for (std::uint32_t s = 0; s < (std::uint32_t(1) << m); ++s) {
    int j = std::popcount(s);
    Scalar cj = (j <= f.bounds()[0]) ? f.coeff({j}) : Scalar(0);
    out.set(s, cj / static_cast<double>(binomial(m, j)));
  }
  return out;
}

// Index layout for Pol_kappa: variable (i, j) with i in [m], j in
// [kappa(i)] flattens to offset(i) + j.
struct PolarizationIndex {
  std::vector<int> kappa;
  std::vector<int> offset;
  int total = 0;

  explicit PolarizationIndex(std::vector<int> k) : kappa(std::move(k)) {
    offset.resize(kappa.size());
    for (std::size_t i = 0; i < kappa.size(); ++i) {
      offset[i] = total;
      total += kappa[i];
    }
  }
  int var(int i, int j) const { return offset[i] + j; }  // j in [0, kappa_i)
};

inline MultiAffinePoly polarize_multi(const DensePoly& f, const std::vector<int>& kappa) {
  require(static_cast<int>(kappa.size()) == f.arity(), "polarize_multi: kappa size");
  for (int i = 0; i < f.arity(); ++i)
    require(f.deg(i) <= kappa[i], "polarize_multi: degree bound violation");
  PolarizationIndex pix(kappa);
  require(pix.total <= kMaxMultiAffineArity, "polarize_multi: variable cap");
  MultiAffinePoly out(pix.total);
  const int m = f.arity();
  std::vector<int> alpha(m);
  for (std::uint32_t s = 0; s < (std::uint32_t(1) << pix.total); ++s) {
    double denom = 1.0;
    for (int i = 0; i < m; ++i) {
      int cnt = 0;
      for (int j = 0; j < kappa[i]; ++j)
        if (s & (std::uint32_t(1) << pix.var(i, j))) ++cnt;
      alpha[i] = cnt;
      denom *= static_cast<double>(binomial(kappa[i], cnt));
    }
    Scalar c = f.coeff(alpha);
    if (c != Scalar(0)) out.set(s, c / denom);
  }
  return out;
}

// Inverse direction: set u_{i1} = ... = u_{i kappa(i)} = x_i.
inline DensePoly polarization_diagonal(const MultiAffinePoly& P, const std::vector<int>& kappa) {
  PolarizationIndex pix(kappa);
  require(P.arity() == pix.total, "polarization_diagonal: arity mismatch");
  const int m = static_cast<int>(kappa.size());
  DensePoly out(m, kappa);
  std::vector<int> alpha(m);
  for (std::uint32_t s = 0; s < (std::uint32_t(1) << pix.total); ++s) {
    Scalar c = P.coeff(s);
    if (c == Scalar(0)) continue;
    for (int i = 0; i < m; ++i) {
      int cnt = 0;
      for (int j = 0; j < kappa[i]; ++j)
        if (s & (std::uint32_t(1) << pix.var(i, j))) ++cnt;
      alpha[i] = cnt;
    }
    out.set(alpha, out.coeff(alpha) + c);
  }
  return out;
}

// T_ij^(lambda) = (1 - lambda) + lambda * tau_ij.
inline MultiAffinePoly partial_symmetrize(const MultiAffinePoly& f, int i, int j, double lambda) {
  require(std::isfinite(lambda), "partial_symmetrize: non-finite lambda");
  MultiAffinePoly swapped = f.swap_vars(i, j);
  return Scalar(1.0 - lambda) * f + Scalar(lambda) * swapped;
}

struct ImbalanceReport {
  std::map<std::pair<int, int>, double> pairwise;
  double total = 0.0;
};

// omega_ij = sum_S |c(S) - c(tau_ij S)|; both members of each orbit count.
inline ImbalanceReport imbalance(const MultiAffinePoly& f) {
  ImbalanceReport rep;
  const int m = f.arity();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      std::uint32_t bi = std::uint32_t(1) << i, bj = std::uint32_t(1) << j;
      double w = 0.0;
      for (std::uint32_t s = 0; s < f.table_size(); ++s) {
        bool hi = s & bi, hj = s & bj;
        std::uint32_t t = (hi != hj) ? ((s ^ bi) ^ bj) : s;
        w += std::abs(f.coeff(s) - f.coeff(t));
      }
      rep.pairwise[{i, j}] = w;
      rep.total += w;
    }
  }
  return rep;
}

struct GwsResult {
  MultiAffinePoly result;
  std::vector<double> trace;  // total imbalance per iterate, starting at F_0
  int iterations = 0;
};

// Greedy partial-symmetrization iteration: start from the split-root lift
// F_0 = c (x_1 - xi_1) ... (x_n - xi_n), repeatedly average the pair of
// maximal imbalance (lambda = 1/2, lexicographic tie-break) until the
// total imbalance falls below tol.  The greedy choice contracts the total
// imbalance by at least (1 - 1/binom(m,2)) per step.
inline GwsResult gws_iterate(const DensePoly& f, int m, double tol = -1.0,
                             int max_iters = 200000) {
  require(f.arity() == 1, "gws_iterate: univariate input required");
  require(!f.is_zero(), "gws_iterate: zero polynomial");
  int d = f.deg(0);
  require(d <= m, "gws_iterate: degree exceeds m");
  require(m <= kMaxMultiAffineArity, "gws_iterate: arity cap");

  MultiAffinePoly F = MultiAffinePoly::constant(m, f.coeff({d}));
  if (d > 0) {
    RootList rl = roots(f);
    for (int k = 0; k < d; ++k) {
      MultiAffinePoly factor(m);
      factor.set(std::uint32_t(1) << k, Scalar(1));
      factor.set(0, -rl.roots[k]);
      // multiplication of multiaffine polynomials in disjoint variables
      MultiAffinePoly next(m);
      for (std::uint32_t s = 0; s < F.table_size(); ++s) {
        Scalar c = F.coeff(s);
        if (c == Scalar(0)) continue;
        next.set(s, next.coeff(s) + c * factor.coeff(0));
        std::uint32_t t = s | (std::uint32_t(1) << k);
        next.set(t, next.coeff(t) + c * factor.coeff(std::uint32_t(1) << k));
      }
      F = next;
    }
  }

  GwsResult out;
  ImbalanceReport rep = imbalance(F);
  out.trace.push_back(rep.total);
  if (tol < 0.0) tol = 1e-10 * std::max(rep.total, 1.0);

  while (rep.total > tol) {
    if (out.iterations >= max_iters)
      throw std::runtime_error("gws_iterate: contraction failed to reach tolerance");
    std::pair<int, int> best = {-1, -1};
    double best_w = -1.0;
    for (const auto& [pair, w] : rep.pairwise) {
      if (w > best_w + 1e-15) {
        best_w = w;
        best = pair;
      }
    }
    F = partial_symmetrize(F, best.first, best.second, 0.5);
    ++out.iterations;
    rep = imbalance(F);
    out.trace.push_back(rep.total);
  }
  out.result = F;
  return out;
}

// f_sh(x, y) = sum_S c(S) x^S binom(m,|S|)^{-1} e_{m-|S|}(y): homogeneous
// of degree m with f_sh(x, 1) = f(x).
inline MultiAffinePoly symmetric_homogenize(const MultiAffinePoly& f) {
  const int m = f.arity();
  require(2 * m <= kMaxMultiAffineArity, "symmetric_homogenize: variable cap");
  MultiAffinePoly out(2 * m);
  for (std::uint32_t s = 0; s < f.table_size(); ++s) {
    Scalar c = f.coeff(s);
    if (c == Scalar(0)) continue;
    int k = std::popcount(s);
    Scalar w = c / static_cast<double>(binomial(m, k));
    // all T subsets of the y block with |T| = m - k
    for (std::uint32_t t = 0; t < (std::uint32_t(1) << m); ++t) {
      if (std::popcount(t) != m - k) continue;
      out.set(s | (t << m), w);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certified wrappers (polarization and partial symmetrization preserve
// stability; symmetric homogenization preserves real stability).

namespace cert {

inline CertifiedPoly polarize_uni(const CertifiedPoly& f, int m) {
  return {stablekit::polarize_uni(f.poly, m).to_dense(), chain(f.derivation, "polarize")};
}

inline CertifiedPoly polarize_multi(const CertifiedPoly& f, const std::vector<int>& kappa) {
  return {stablekit::polarize_multi(f.poly, kappa).to_dense(),
          chain(f.derivation, "polarize-multi")};
}

inline CertifiedPoly partial_symmetrize(const CertifiedPoly& f, int i, int j, double lambda) {
  require(0.0 <= lambda && lambda <= 1.0,
          "partial_symmetrize: lambda outside [0,1] is not certifiable");
  MultiAffinePoly g = MultiAffinePoly::from_dense(f.poly);
  return {stablekit::partial_symmetrize(g, i, j, lambda).to_dense(),
          chain(f.derivation, "partial-symmetrize")};
}

inline CertifiedPoly symmetric_homogenize(const CertifiedPoly& f) {
  require(f.poly.is_real(), "symmetric_homogenize: real input required for certification");
  MultiAffinePoly g = MultiAffinePoly::from_dense(f.poly);
  return {stablekit::symmetric_homogenize(g).to_dense(),
          chain(f.derivation, "symmetric-homogenize")};
}

}  // namespace cert

}  // namespace stablekit
