#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <vector>

#include "stablekit/dense.hpp"
#include "stablekit/scalar.hpp"

namespace stablekit {

struct RootList {
  std::vector<Scalar> roots;  // sorted by (re, im)
  double residual = 0.0;      // max |f(root)| / (1 + max|coeff|)
  double scale = 1.0;         // max(1, max |root|)
};

namespace detail {

// Parlett-Reinsch style balancing by powers of two.
inline void balance(Eigen::MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  bool converged = false;
  while (!converged) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0, s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converged = false;
        A.col(i) *= f;
        A.row(i) /= f;
      }
    }
  }
}

inline std::vector<Scalar> trimmed_coeffs(const DensePoly& p, double tol) {
  require(p.arity() == 1, "roots: univariate input required");
  std::vector<Scalar> c = p.coeffs();
  double m = p.max_abs();
  require(m > tol, "roots: zero polynomial");
  while (c.size() > 1 && std::abs(c.back()) <= tol * m) c.pop_back();
  return c;
}

}  // namespace detail

// All complex roots via a balanced companion-matrix eigensolve with one
// Newton polish per root.  Intended for degree <= 64.
inline RootList roots(const DensePoly& p, double tol = kEpsZero) {
  std::vector<Scalar> c = detail::trimmed_coeffs(p, tol);
  int d = static_cast<int>(c.size()) - 1;
  require(d <= 64, "roots: degree above 64");
  RootList out;
  if (d == 0) return out;

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) A(i, i - 1) = Scalar(1);
  for (int i = 0; i < d; ++i) A(i, d - 1) = -c[i] / c[d];
  detail::balance(A);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
  require(es.info() == Eigen::Success, "roots: eigensolver failed");

  out.roots.resize(d);
  for (int i = 0; i < d; ++i) out.roots[i] = es.eigenvalues()(i);

  auto eval = [&](Scalar z) {
    Scalar v(0);
    for (int k = d; k >= 0; --k) v = v * z + c[k];
    return v;
  };
  auto deriv = [&](Scalar z) {
    Scalar v(0);
    for (int k = d; k >= 1; --k) v = v * z + double(k) * c[k];
    return v;
  };
  for (Scalar& r : out.roots) {
    for (int it = 0; it < 3; ++it) {
      Scalar f = eval(r), fp = deriv(r);
      if (std::abs(fp) < 1e-14) break;
      Scalar step = f / fp;
      if (std::abs(step) > 0.5 * (1.0 + std::abs(r))) break;
      Scalar cand = r - step;
      if (std::abs(eval(cand)) >= std::abs(f)) break;
      r = cand;
    }
  }
  std::sort(out.roots.begin(), out.roots.end(), [](const Scalar& x, const Scalar& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });

  double cmax = 0.0;
  for (const Scalar& v : c) cmax = std::max(cmax, std::abs(v));
  for (const Scalar& r : out.roots) {
    out.residual = std::max(out.residual, std::abs(eval(r)) / (1.0 + cmax));
    out.scale = std::max(out.scale, std::abs(r));
  }
  return out;
}

inline bool is_real_rooted(const DensePoly& p, double tol = kEpsZero) {
  RootList rl = roots(p, tol);
  double tau = kRootImagTol * rl.scale;
  for (const Scalar& r : rl.roots)
    if (std::abs(r.imag()) > tau) return false;
  return true;
}

enum class InterlaceResult { kInterlaced, kNotInterlaced, kDegenerate };

// Strict interlacing of the real roots of two real-rooted polynomials.
// Near-coincident roots (within the collision tolerance) are reported as
// degenerate rather than guessed.
inline InterlaceResult interlaces(const DensePoly& f, const DensePoly& g) {
  RootList rf = roots(f), rg = roots(g);
  double sc = std::max(rf.scale, rg.scale);
  double tau_im = kRootImagTol * sc;
  for (const Scalar& r : rf.roots)
    require(std::abs(r.imag()) <= tau_im, "interlaces: input not real-rooted");
  for (const Scalar& r : rg.roots)
    require(std::abs(r.imag()) <= tau_im, "interlaces: input not real-rooted");

  std::vector<std::pair<double, int>> merged;
  for (const Scalar& r : rf.roots) merged.push_back({r.real(), 0});
  for (const Scalar& r : rg.roots) merged.push_back({r.real(), 1});
  std::sort(merged.begin(), merged.end());

  double tau_col = kRootCollisionTol * sc;
  for (std::size_t i = 1; i < merged.size(); ++i)
    if (merged[i].first - merged[i - 1].first <= tau_col) return InterlaceResult::kDegenerate;

  long df = static_cast<long>(rf.roots.size()), dg = static_cast<long>(rg.roots.size());
  if (std::abs(df - dg) > 1) return InterlaceResult::kNotInterlaced;
  for (std::size_t i = 1; i < merged.size(); ++i)
    if (merged[i].second == merged[i - 1].second) return InterlaceResult::kNotInterlaced;
  return InterlaceResult::kInterlaced;
}

enum class ProperPosition { F_LL_G, G_LL_F, BOTH, NEITHER };

namespace detail {

// Global sign of a real univariate polynomial over R, certified by its
// values at the real critical points plus leading-term asymptotics.
// Returns +1 (>= 0 everywhere), -1 (<= 0), 0 (identically ~0), 2 (mixed).
inline int global_sign(const DensePoly& w, double tol) {
  double scale = std::max(1.0, w.max_abs());
  if (w.is_zero(tol * scale)) return 0;
  std::vector<Scalar> c = detail::trimmed_coeffs(w, tol * scale);
  int d = static_cast<int>(c.size()) - 1;
  double lead = c[d].real();
  bool lo = false, hi = false;  // takes values < -tol / > +tol
  if (d % 2 == 1) {
    lo = hi = true;
  } else if (d > 0) {
    (lead > 0 ? hi : lo) = true;
  } else {
    (lead > 0 ? hi : lo) = true;
  }
  if (d >= 2) {
    DensePoly wp = w.derivative(0);
    RootList crit = roots(wp);
    double tau = kRootImagTol * crit.scale;
    for (const Scalar& r : crit.roots) {
      if (std::abs(r.imag()) > tau) continue;
      double v = w.evaluate(PointC{Scalar(r.real(), 0.0)}).real();
      if (v > tol * scale) hi = true;
      if (v < -tol * scale) lo = true;
    }
  }
  if (lo && hi) return 2;
  if (hi) return 1;
  if (lo) return -1;
  return 0;
}

}  // namespace detail

// Sign classification of W[f, g] over R.  BOTH iff cf = dg; the zero
// polynomial is in proper position with everything.
inline ProperPosition proper_position(const DensePoly& f, const DensePoly& g,
                                      double tol = kEpsZero) {
  require(f.arity() == 1 && g.arity() == 1, "proper_position: univariate input required");
  double sf = std::max(1.0, f.max_abs()), sg = std::max(1.0, g.max_abs());
  if (f.is_zero(tol * sf) || g.is_zero(tol * sg)) return ProperPosition::BOTH;
  require(f.is_real(tol * sf) && g.is_real(tol * sg), "proper_position: real input required");
  require(is_real_rooted(f), "proper_position: f not real-rooted");
  require(is_real_rooted(g), "proper_position: g not real-rooted");
  DensePoly w = f.derivative(0) * g - f * g.derivative(0);
  switch (detail::global_sign(w, tol)) {
    case 0:
      return ProperPosition::BOTH;
    case -1:
      return ProperPosition::F_LL_G;
    case 1:
      return ProperPosition::G_LL_F;
    default:
      return ProperPosition::NEITHER;
  }
}

struct HbReport {
  bool stable = false;          // g + i f has no root in the open upper half-plane
  bool via_wronskian = false;   // real-rooted pair with f << g (or proportional)
  bool agree = false;
};

// Stability of g + i f, cross-checked against the interlacing route.
inline HbReport hb_check(const DensePoly& f, const DensePoly& g, double tol = kEpsZero) {
  require(f.arity() == 1 && g.arity() == 1, "hb_check: univariate input required");
  HbReport rep;
  DensePoly p = g + Scalar(0, 1) * f;
  double sp = std::max(1.0, p.max_abs());
  if (p.is_zero(tol * sp)) {
    rep.stable = true;
  } else {
    RootList rl = roots(p);
    rep.stable = true;
    double tau = kRootImagTol * rl.scale;
    for (const Scalar& r : rl.roots)
      if (r.imag() > tau) rep.stable = false;
  }

  bool both_rr = true;
  double sf = std::max(1.0, f.max_abs()), sg = std::max(1.0, g.max_abs());
  bool fzero = f.is_zero(tol * sf), gzero = g.is_zero(tol * sg);
  if (!fzero && !f.is_real(tol * sf)) both_rr = false;
  if (!gzero && !g.is_real(tol * sg)) both_rr = false;
  if (both_rr && !fzero && !is_real_rooted(f)) both_rr = false;
  if (both_rr && !gzero && !is_real_rooted(g)) both_rr = false;
  if (both_rr) {
    ProperPosition pp = proper_position(f, g, tol);
    rep.via_wronskian = (pp == ProperPosition::F_LL_G || pp == ProperPosition::BOTH);
  } else {
    rep.via_wronskian = false;
  }
  rep.agree = (rep.stable == rep.via_wronskian);
  return rep;
}

}  // namespace stablekit
