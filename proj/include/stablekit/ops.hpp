#pragma once

#include <vector>

#include "stablekit/dense.hpp"
#include "stablekit/multiaffine.hpp"

namespace stablekit {

// ---------------------------------------------------------------------------
// Closure operations (free-function spellings for the dense carrier).

inline DensePoly differentiate(const DensePoly& f, int i) { return f.derivative(i); }
inline DensePoly specialize(const DensePoly& f, int i, Scalar a) { return f.specialize(i, a); }
inline DensePoly diagonalize(const DensePoly& f, int i, int j) { return f.diagonalize(i, j); }
inline DensePoly invert(const DensePoly& f, int i) { return f.invert(i); }
inline DensePoly permute(const DensePoly& f, const std::vector<int>& sigma) { return f.permute(sigma); }
inline DensePoly scale(const DensePoly& f, Scalar c, const PointR& a) { return f.scale_vars(c, a); }

inline DensePoly restrict_line(const DensePoly& f, const PointR& a, const PointR& b) {
  return f.restrict_line(a, b);
}
inline DensePoly restrict_line(const MultiAffinePoly& f, const PointR& a, const PointR& b) {
  return f.restrict_line(a, b);
}

// W_i[f, g] = d_i f * g - f * d_i g.
inline DensePoly wronskian(const DensePoly& f, const DensePoly& g, int i) {
  require(f.arity() == g.arity(), "wronskian: arity mismatch");
  return f.derivative(i) * g - f * g.derivative(i);
}
inline DensePoly wronskian(const MultiAffinePoly& f, const MultiAffinePoly& g, int i) {
  return wronskian(f.to_dense(), g.to_dense(), i);
}

// Delta_ij f = d_i f * d_j f - f * d_i d_j f.  For multiaffine input the
// result has degree <= 2 in each remaining variable and degree 0 in i, j.
// The slice identity Delta_ij f = f_i^j f_j^i - f^{ij} f_{ij} is verified
// internally on every call.
inline DensePoly delta(const MultiAffinePoly& f, int i, int j) {
  require(i != j, "delta: indices must differ");
  require(0 <= i && i < f.arity() && 0 <= j && j < f.arity(), "delta: index out of range");
  MultiAffinePoly fi = f.derivative_keep(i);
  MultiAffinePoly fj = f.derivative_keep(j);
  MultiAffinePoly fij = fi.derivative_keep(j);
  DensePoly by_def = fi.to_dense() * fj.to_dense() - f.to_dense() * fij.to_dense();

  MultiAffinePoly a = fi.at_zero_keep(j);   // f_i^j
  MultiAffinePoly b = fj.at_zero_keep(i);   // f_j^i
  MultiAffinePoly c = f.at_zero_keep(i).at_zero_keep(j);  // f^{ij}
  DensePoly by_slices = a.to_dense() * b.to_dense() - c.to_dense() * fij.to_dense();

  double scale = std::max(1.0, f.max_abs());
  if (!approx_equal(by_def, by_slices, 1e-9 * scale * scale))
    throw std::runtime_error("delta: slice identity violated");
  return by_def;
}

inline DensePoly delta(const DensePoly& f, int i, int j) {
  require(i != j, "delta: indices must differ");
  return f.derivative(i) * f.derivative(j) - f * f.derivative(i).derivative(j);
}

// Viewing Delta_ij f as a quadratic in x_h: A x_h^2 + B x_h + C.
// D_hij = B^2 - 4 A C, a polynomial in the variables other than h, i, j.
inline DensePoly discriminant_D(const MultiAffinePoly& f, int h, int i, int j) {
  require(h != i && h != j && i != j, "discriminant_D: indices must be distinct");
  DensePoly d = delta(f, i, j);
  // slice along x_h
  std::vector<std::vector<Scalar>> rowC = {{Scalar(1), Scalar(0), Scalar(0)}};
  std::vector<std::vector<Scalar>> rowB = {{Scalar(0), Scalar(1), Scalar(0)}};
  std::vector<std::vector<Scalar>> rowA = {{Scalar(0), Scalar(0), Scalar(1)}};
  DensePoly dd = d;
  if (dd.bounds()[h] < 2) {
    // pad axis h to quadratic so the slice rows line up
    std::vector<std::vector<Scalar>> pad(3, std::vector<Scalar>(dd.bounds()[h] + 1, Scalar(0)));
    for (int k = 0; k <= dd.bounds()[h]; ++k) pad[k][k] = Scalar(1);
    dd = dd.axis_linear_map(h, pad);
  }
  DensePoly C = dd.axis_linear_map(h, rowC);
  DensePoly B = dd.axis_linear_map(h, rowB);
  DensePoly A = dd.axis_linear_map(h, rowA);
  return B * B - 4.0 * (A * C);
}

// ---------------------------------------------------------------------------
// Per-coordinate Moebius transformation z -> (a z + b) / (c z + d).

struct MoebiusMap {
  Scalar a{1.0}, b{0.0}, c{0.0}, d{1.0};

  static MoebiusMap identity() { return {}; }
  // phi(H) = open unit disc (Cayley transform).
  static MoebiusMap upper_to_disc() { return {Scalar(1), Scalar(0, -1), Scalar(1), Scalar(0, 1)}; }
  // phi(H) = open right half-plane.
  static MoebiusMap upper_to_right() { return {Scalar(0, -1), Scalar(0), Scalar(0), Scalar(1)}; }
  // z -> -1/z (the inversion of the closure lemma).
  static MoebiusMap negative_reciprocal() { return {Scalar(0), Scalar(-1), Scalar(1), Scalar(0)}; }

  Scalar determinant() const { return a * d - b * c; }

  MoebiusMap inverse() const {
    require(std::abs(determinant()) > 0.0, "MoebiusMap: singular");
    return {d, -b, -c, a};
  }

  Scalar apply(Scalar z) const {
    Scalar den = c * z + d;
    require(std::abs(den) > 0.0, "MoebiusMap: pole hit");
    return (a * z + b) / den;
  }
};

namespace detail {

inline std::vector<Scalar> poly_pow(Scalar c0, Scalar c1, int k) {
  std::vector<Scalar> r = {Scalar(1)};
  for (int t = 0; t < k; ++t) {
    std::vector<Scalar> nxt(r.size() + 1, Scalar(0));
    for (std::size_t q = 0; q < r.size(); ++q) {
      nxt[q] += r[q] * c0;
      nxt[q + 1] += r[q] * c1;
    }
    r = std::move(nxt);
  }
  return r;
}

}  // namespace detail

// (c z + d)^kappa * f(phi_1(z_1), ..., phi_m(z_m)) for the supplied
// per-variable degrees kappa; f is coordinatewise conjugated so that
// region questions about phi(H) reduce to half-plane questions.
inline DensePoly moebius_conjugate(const DensePoly& f, const std::vector<MoebiusMap>& phi,
                                   const std::vector<int>& degrees) {
  require(static_cast<int>(phi.size()) == f.arity(), "moebius_conjugate: map count");
  require(static_cast<int>(degrees.size()) == f.arity(), "moebius_conjugate: degree count");
  DensePoly out = f;
  for (int v = 0; v < f.arity(); ++v) {
    require(std::abs(phi[v].determinant()) > kEpsZero, "moebius_conjugate: singular map");
    int kap = degrees[v];
    require(kap >= out.bounds()[v], "moebius_conjugate: degree below bound");
    // pad axis to kappa first so every slice exists
    if (out.bounds()[v] < kap) {
      std::vector<std::vector<Scalar>> pad(kap + 1, std::vector<Scalar>(out.bounds()[v] + 1, Scalar(0)));
      for (int k = 0; k <= out.bounds()[v]; ++k) pad[k][k] = Scalar(1);
      out = out.axis_linear_map(v, pad);
    }
    // column k of M: coefficients of (a z + b)^k (c z + d)^(kappa - k)
    std::vector<std::vector<Scalar>> M(kap + 1, std::vector<Scalar>(kap + 1, Scalar(0)));
    for (int k = 0; k <= kap; ++k) {
      auto num = detail::poly_pow(phi[v].b, phi[v].a, k);
      auto den = detail::poly_pow(phi[v].d, phi[v].c, kap - k);
      for (std::size_t p = 0; p < num.size(); ++p)
        for (std::size_t q = 0; q < den.size(); ++q)
          M[p + q][k] += num[p] * den[q];
    }
    out = out.axis_linear_map(v, M);
  }
  return out;
}

inline DensePoly moebius_conjugate(const DensePoly& f, const MoebiusMap& phi) {
  std::vector<int> degs(f.arity());
  for (int v = 0; v < f.arity(); ++v) degs[v] = f.bounds()[v];
  return moebius_conjugate(f, std::vector<MoebiusMap>(f.arity(), phi), degs);
}

}  // namespace stablekit
