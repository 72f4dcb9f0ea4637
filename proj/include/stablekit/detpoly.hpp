#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "stablekit/certify.hpp"
#include "stablekit/dense.hpp"
#include "stablekit/roots.hpp"
#include "stablekit/rng.hpp"

namespace stablekit {

using CMatrix = Eigen::MatrixXcd;

struct HermitianMatrix {
  CMatrix a;

  explicit HermitianMatrix(CMatrix m) : a(std::move(m)) {
    require(a.rows() == a.cols(), "HermitianMatrix: square required");
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    require((a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            "HermitianMatrix: not Hermitian");
    a = 0.5 * (a + a.adjoint().eval());  // kill the residue
  }

  int n() const { return static_cast<int>(a.rows()); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  double norm() const { return std::max(1e-300, a.cwiseAbs().maxCoeff()); }

  bool is_psd() const { return min_eigenvalue() >= -1e-10 * norm(); }
  bool is_pd() const { return min_eigenvalue() > 1e-10 * norm(); }
};

struct MatrixPencil {
  std::vector<HermitianMatrix> A;
  HermitianMatrix B;

  MatrixPencil(std::vector<HermitianMatrix> a, HermitianMatrix b)
      : A(std::move(a)), B(std::move(b)) {
    for (const auto& Ai : A)
      require(Ai.n() == B.n(), "MatrixPencil: dimension mismatch");
  }

  int m() const { return static_cast<int>(A.size()); }
  int n() const { return B.n(); }
  bool all_psd() const {
    for (const auto& Ai : A)
      if (!Ai.is_psd()) return false;
    return true;
  }
};

struct Inertia {
  int neg = 0, zero = 0, pos = 0;
  bool operator==(const Inertia&) const = default;
};

namespace detail {

inline Scalar principal_det(const CMatrix& M, const std::vector<int>& rows) {
  int k = static_cast<int>(rows.size());
  if (k == 0) return Scalar(1);
  CMatrix sub(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) sub(r, c) = M(rows[r], rows[c]);
  return Eigen::PartialPivLU<CMatrix>(sub).determinant();
}

inline Scalar principal_det_mask(const CMatrix& M, std::uint32_t mask) {
  std::vector<int> rows;
  for (int i = 0; i < M.rows(); ++i)
    if (mask & (std::uint32_t(1) << i)) rows.push_back(i);
  return principal_det(M, rows);
}

inline CMatrix drop_index(const CMatrix& M, int j) {
  int n = static_cast<int>(M.rows());
  CMatrix out(n - 1, n - 1);
  for (int r = 0, rr = 0; r < n; ++r) {
    if (r == j) continue;
    for (int c = 0, cc = 0; c < n; ++c) {
      if (c == j) continue;
      out(rr, cc) = M(r, c);
      ++cc;
    }
    ++rr;
  }
  return out;
}

// Exact-size Vandermonde solve on the symmetric integer nodes used by the
// evaluation grids.
inline std::vector<std::vector<Scalar>> inverse_vandermonde(const std::vector<double>& nodes) {
  int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd V(n, n);
  for (int r = 0; r < n; ++r) {
    double p = 1.0;
    for (int c = 0; c < n; ++c) {
      V(r, c) = p;
      p *= nodes[r];
    }
  }
  Eigen::MatrixXd Vi = V.fullPivLu().inverse();
  std::vector<std::vector<Scalar>> M(n, std::vector<Scalar>(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) M[r][c] = Scalar(Vi(r, c), 0.0);
  return M;
}

inline std::vector<double> grid_nodes(int count) {
  std::vector<double> nodes(count);
  for (int k = 0; k < count; ++k) nodes[k] = k - (count - 1) / 2.0;
  return nodes;
}

// Tensor evaluation-interpolation: fills a dense table with values of
// `eval` on the integer grid, then converts each axis to coefficients.
template <class EvalFn>
DensePoly interpolate_grid(int m, const std::vector<int>& degs, EvalFn&& eval) {
  DensePoly table(m, degs);
  std::vector<std::vector<double>> nodes(m);
  for (int v = 0; v < m; ++v) nodes[v] = grid_nodes(degs[v] + 1);
  std::vector<int> idx;
  PointR x(m);
  auto& c = table.coeffs_mut();
  for (long lin = 0; lin < table.box_size(); ++lin) {
    table.decompose(lin, idx);
    for (int v = 0; v < m; ++v) x[v] = nodes[v][idx[v]];
    c[lin] = eval(x);
  }
  DensePoly out = table;
  for (int v = 0; v < m; ++v)
    out = out.axis_linear_map(v, inverse_vandermonde(nodes[v]));
  return out;
}

}  // namespace detail

// det(x_1 A_1 + ... + x_m A_m + B) recovered exactly by grid
// interpolation (degree <= n per variable).  Real by Hermitian symmetry;
// the imaginary residue is asserted small and dropped.
inline DensePoly pencil_poly(const MatrixPencil& P) {
  const int m = P.m(), n = P.n();
  std::vector<int> degs(m, n);
  DensePoly raw = detail::interpolate_grid(m, degs, [&](const PointR& x) {
    CMatrix M = P.B.a;
    for (int i = 0; i < m; ++i) M += x[i] * P.A[i].a;
    return Eigen::PartialPivLU<CMatrix>(M).determinant();
  });
  double scale = std::max(1.0, raw.max_abs());
  std::vector<Scalar>& c = raw.coeffs_mut();
  for (Scalar& v : c) {
    require(std::abs(v.imag()) <= 1e-10 * scale, "pencil_poly: imaginary residue");
    v = Scalar(v.real(), 0.0);
  }
  return raw.trimmed(1e-12 * scale);
}

// Certified-stable generator; requires verified PSD coefficients.
inline CertifiedPoly certified_pencil(const MatrixPencil& P) {
  require(P.all_psd(), "certified_pencil: A_i not PSD");
  return {pencil_poly(P), {"pencil"}};
}

// Mixed determinant: sum over assignments of [n] to the k matrices of the
// product of complementary principal minors.
inline double mixed_det(const std::vector<CMatrix>& A) {
  require(!A.empty(), "mixed_det: empty tuple");
  const int k = static_cast<int>(A.size());
  const int n = static_cast<int>(A[0].rows());
  for (const auto& M : A)
    require(M.rows() == n && M.cols() == n, "mixed_det: dimension mismatch");
  double cap = std::pow(static_cast<double>(k), n);
  require_cap(cap <= static_cast<double>(1 << 24), "mixed_det: enumeration cap exceeded");

  std::vector<int> assign(n, 0);
  std::vector<std::vector<int>> groups(k);
  Scalar total(0);
  bool done = false;
  while (!done) {
    for (auto& g : groups) g.clear();
    for (int r = 0; r < n; ++r) groups[assign[r]].push_back(r);
    Scalar prod(1);
    for (int i = 0; i < k && prod != Scalar(0); ++i)
      prod *= detail::principal_det(A[i], groups[i]);
    total += prod;
    done = true;
    for (int r = 0; r < n; ++r) {
      if (++assign[r] < k) {
        done = false;
        break;
      }
      assign[r] = 0;
    }
  }
  require(std::abs(total.imag()) <= 1e-9 * (1.0 + std::abs(total)), "mixed_det: imaginary residue");
  return total.real();
}

// Det(L_1(x), ..., L_l(x)) as a polynomial in x for a tuple of pencils
// sharing the variables; per-variable degree is at most n.
inline DensePoly mixed_det_pencil_poly(const std::vector<MatrixPencil>& Ls) {
  require(!Ls.empty(), "mixed_det_pencil_poly: empty tuple");
  const int m = Ls[0].m(), n = Ls[0].n();
  for (const auto& L : Ls)
    require(L.m() == m && L.n() == n, "mixed_det_pencil_poly: shape mismatch");
  std::vector<int> degs(m, n);
  DensePoly p = detail::interpolate_grid(m, degs, [&](const PointR& x) {
    std::vector<CMatrix> mats;
    mats.reserve(Ls.size());
    for (const auto& L : Ls) {
      CMatrix M = L.B.a;
      for (int i = 0; i < m; ++i) M += x[i] * L.A[i].a;
      mats.push_back(std::move(M));
    }
    return Scalar(mixed_det(mats), 0.0);
  });
  double scale = std::max(1.0, p.max_abs());
  for (Scalar& v : p.coeffs_mut()) {
    require(std::abs(v.imag()) <= 1e-9 * scale, "mixed_det_pencil_poly: imaginary residue");
    v = Scalar(v.real(), 0.0);
  }
  return p.trimmed(1e-12 * scale);
}

inline MatrixPencil drop_site(const MatrixPencil& P, int j) {
  std::vector<HermitianMatrix> A;
  for (const auto& Ai : P.A) A.push_back(HermitianMatrix(detail::drop_index(Ai.a, j)));
  return MatrixPencil(std::move(A), HermitianMatrix(detail::drop_index(P.B.a, j)));
}

// Det(xA, -B) = sum_j x^j (-1)^{n-j} sum_{|S|=j} det A[S] det B(S).
inline DensePoly charlike_poly(const CMatrix& A, const CMatrix& B) {
  const int n = static_cast<int>(A.rows());
  require(n <= 20, "charlike_poly: dimension cap");
  std::vector<Scalar> coef(n + 1, Scalar(0));
  const std::uint32_t full = (n == 32) ? 0xFFFFFFFFu : ((std::uint32_t(1) << n) - 1);
  for (std::uint32_t S = 0;; ++S) {
    int j = std::popcount(S);
    Scalar term = detail::principal_det_mask(A, S) * detail::principal_det_mask(B, full & ~S);
    coef[j] += ((n - j) % 2 == 0 ? 1.0 : -1.0) * term;
    if (S == full) break;
  }
  double scale = 1.0;
  for (const Scalar& c : coef) scale = std::max(scale, std::abs(c));
  for (Scalar& c : coef) {
    require(std::abs(c.imag()) <= 1e-9 * scale, "charlike_poly: imaginary residue");
    c = Scalar(c.real(), 0.0);
  }
  return DensePoly::univariate(coef);
}

inline Inertia inertia_of_roots(const RootList& rl) {
  Inertia io;
  double tol = kRootImagTol * rl.scale;
  for (const Scalar& r : rl.roots) {
    if (std::abs(r.real()) <= tol) ++io.zero;
    else if (r.real() < 0) ++io.neg;
    else ++io.pos;
  }
  return io;
}

inline Inertia inertia_of_matrix(const HermitianMatrix& B) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(B.a, Eigen::EigenvaluesOnly);
  Inertia io;
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (int i = 0; i < B.n(); ++i) {
    double l = es.eigenvalues()(i);
    if (std::abs(l) <= kRootImagTol * scale) ++io.zero;
    else if (l < 0) ++io.neg;
    else ++io.pos;
  }
  return io;
}

enum class InterlaceStatus { Holds, Fails, Degenerate };

struct JohnsonReport {
  DensePoly p;                               // Det(xA, -B)
  bool real_rooted = false;                  // (a)
  std::vector<InterlaceStatus> interlacing;  // (b), per dropped index
  Inertia poly_inertia, matrix_inertia;
  bool inertia_match = false;                // (c)
  bool all_hold() const {
    if (!real_rooted || !inertia_match) return false;
    for (auto s : interlacing)
      if (s != InterlaceStatus::Holds) return false;
    return true;
  }
  bool any_degenerate() const {
    for (auto s : interlacing)
      if (s == InterlaceStatus::Degenerate) return true;
    return false;
  }
};

inline JohnsonReport johnson_suite(const HermitianMatrix& A, const HermitianMatrix& B) {
  require(A.n() == B.n(), "johnson_suite: dimension mismatch");
  require(A.is_pd(), "johnson_suite: A not positive definite");
  JohnsonReport rep;
  rep.p = charlike_poly(A.a, B.a);
  rep.real_rooted = is_real_rooted(rep.p);

  const int n = A.n();
  for (int j = 0; j < n; ++j) {
    DensePoly q = charlike_poly(detail::drop_index(A.a, j), detail::drop_index(B.a, j));
    InterlaceStatus st = InterlaceStatus::Fails;
    try {
      switch (interlaces(q, rep.p)) {
        case InterlaceResult::kInterlaced: st = InterlaceStatus::Holds; break;
        case InterlaceResult::kNotInterlaced: st = InterlaceStatus::Fails; break;
        case InterlaceResult::kDegenerate: st = InterlaceStatus::Degenerate; break;
      }
    } catch (const std::invalid_argument&) {
      st = InterlaceStatus::Degenerate;  // non-real-rooted inputs surface as degeneracy
    }
    rep.interlacing.push_back(st);
  }

  rep.poly_inertia = inertia_of_roots(roots(rep.p));
  rep.matrix_inertia = inertia_of_matrix(B);
  rep.inertia_match = (rep.poly_inertia == rep.matrix_inertia);
  return rep;
}

struct FisherProducts {
  std::vector<double> sigma;      // sigma_j, 0 <= j <= n
  std::vector<double> averaged;   // sigma_j / binom(n, j)
};

inline FisherProducts fisher_products(const HermitianMatrix& A) {
  const int n = A.n();
  require_cap(n <= 16, "fisher_products: dimension cap");
  FisherProducts fp;
  fp.sigma.assign(n + 1, 0.0);
  const std::uint32_t full = (std::uint32_t(1) << n) - 1;
  for (std::uint32_t S = 0;; ++S) {
    Scalar term = detail::principal_det_mask(A.a, S) * detail::principal_det_mask(A.a, full & ~S);
    require(std::abs(term.imag()) <= 1e-9 * (1.0 + std::abs(term)),
            "fisher_products: imaginary residue");
    fp.sigma[std::popcount(S)] += term.real();
    if (S == full) break;
  }
  double scale = 1.0;
  for (double s : fp.sigma) scale = std::max(scale, std::abs(s));
  for (int j = 0; j <= n; ++j)
    require(std::abs(fp.sigma[j] - fp.sigma[n - j]) <= 1e-9 * scale,
            "fisher_products: symmetry violated");
  fp.averaged.resize(n + 1);
  for (int j = 0; j <= n; ++j)
    fp.averaged[j] = fp.sigma[j] / static_cast<double>(binomial(n, j));
  return fp;
}

struct NewtonMaclaurinReport {
  bool newton = true;    // averaged[j]^2 >= averaged[j-1] * averaged[j+1]
  bool monotone = true;  // averaged[0] <= ... <= averaged[floor(n/2)]
  bool maclaurin = true; // (averaged[j]/d)^{1/j} nonincreasing, ends at 1
  double newton_margin = 0.0;     // most negative slack seen
  double monotone_margin = 0.0;
  double maclaurin_margin = 0.0;
  std::vector<double> averaged;
};

inline NewtonMaclaurinReport newton_maclaurin_check(const HermitianMatrix& A) {
  require(A.is_psd(), "newton_maclaurin_check: A not PSD");
  const int n = A.n();
  // The chain is invariant under A -> cA; normalize so margins are O(1).
  HermitianMatrix An(A.a / A.norm());
  FisherProducts fp = fisher_products(An);
  NewtonMaclaurinReport rep;
  rep.averaged = fisher_products(A).averaged;
  const auto& s = fp.averaged;
  const double slack = -1e-9;
  for (int j = 1; j <= n - 1; ++j) {
    double margin = s[j] * s[j] - s[j - 1] * s[j + 1];
    rep.newton_margin = std::min(rep.newton_margin, margin);
    if (margin < slack) rep.newton = false;
  }
  for (int j = 0; j + 1 <= n / 2; ++j) {
    double margin = s[j + 1] - s[j];
    rep.monotone_margin = std::min(rep.monotone_margin, margin);
    if (margin < slack) rep.monotone = false;
  }
  if (An.is_pd()) {
    double d = s[n];  // det of the normalized matrix
    require(d > 0, "newton_maclaurin_check: determinant not positive");
    double prev = 0.0;
    for (int j = 1; j <= n; ++j) {
      double val = std::pow(s[j] / d, 1.0 / j);
      if (j > 1) {
        double margin = prev - val;
        rep.maclaurin_margin = std::min(rep.maclaurin_margin, margin);
        if (margin < slack) rep.maclaurin = false;
      }
      prev = val;
    }
    double final_margin = std::abs(prev - 1.0);
    if (final_margin > 1e-7) rep.maclaurin = false;
  } else {
    rep.maclaurin = false;  // (c) needs positive definite input
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Random certified-stable generators built on rank-one pencils.

inline HermitianMatrix random_hermitian(Rng& rng, int n, double scale = 1.0) {
  CMatrix M(n, n);
  for (int r = 0; r < n; ++r) {
    M(r, r) = Scalar(scale * rng.uniform(-1, 1), 0.0);
    for (int c = r + 1; c < n; ++c) {
      Scalar v = scale * Scalar(rng.uniform(-1, 1), rng.uniform(-1, 1));
      M(r, c) = v;
      M(c, r) = std::conj(v);
    }
  }
  return HermitianMatrix(M);
}

inline HermitianMatrix random_psd(Rng& rng, int n, double scale = 1.0) {
  CMatrix G(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) G(r, c) = scale * Scalar(rng.normal(), rng.normal());
  return HermitianMatrix((G.adjoint() * G).eval());
}

inline HermitianMatrix random_pd(Rng& rng, int n, double scale = 1.0) {
  HermitianMatrix M = random_psd(rng, n, scale);
  return HermitianMatrix(M.a + 0.05 * scale * scale * CMatrix::Identity(n, n));
}

// Multiaffine real stable polynomial det(sum_i x_i v_i v_i^* + B),
// normalized to unit coefficient scale.
inline CertifiedPoly random_certified_multiaffine(Rng& rng, int m,
                                                  bool nonneg_constant = false) {
  int n = m;
  std::vector<HermitianMatrix> A;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXcd v(n);
    for (int r = 0; r < n; ++r) v(r) = Scalar(rng.normal(), rng.normal());
    A.push_back(HermitianMatrix((v * v.adjoint()).eval()));
  }
  HermitianMatrix B = nonneg_constant ? random_psd(rng, n, 0.6) : random_hermitian(rng, n, 0.8);
  CertifiedPoly out = certified_pencil(MatrixPencil(std::move(A), std::move(B)));
  double mx = out.poly.max_abs();
  if (mx > kEpsZero)
    out = cert::scale(out, Scalar(1.0 / mx), PointR(out.poly.arity(), 1.0));
  return out;
}

}  // namespace stablekit
