#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stablekit/dense.hpp"
#include "stablekit/multiaffine.hpp"
#include "stablekit/rng.hpp"
#include "stablekit/verdict.hpp"

namespace stablekit {

// A polynomial together with a replayable chain of stability-preserving
// construction steps from certified generators.
struct CertifiedPoly {
  DensePoly poly;
  std::vector<std::string> derivation;

  StabilityVerdict verdict() const { return StabilityVerdict::certified(derivation); }
  MultiAffinePoly multiaffine() const { return MultiAffinePoly::from_dense(poly); }
};

namespace cert {

inline std::vector<std::string> chain(const std::vector<std::string>& prev, std::string tag) {
  std::vector<std::string> out = prev;
  out.push_back(std::move(tag));
  return out;
}

inline CertifiedPoly zero(int arity) {
  return {DensePoly::constant(arity, Scalar(0)), {"zero"}};
}

// c * x^alpha: monomials never vanish on H^m.
inline CertifiedPoly monomial(int arity, const std::vector<int>& alpha, Scalar c) {
  std::vector<int> kappa = alpha;
  DensePoly p(arity, kappa);
  p.set(alpha, c);
  return {p, {"monomial"}};
}

// w . x + c0 with w >= 0 real (not all negative entries) and Im(c0) >= 0:
// the imaginary part is positive throughout H^m.
inline CertifiedPoly affine_form(const PointR& w, Scalar c0) {
  for (double wi : w) require(wi >= 0.0, "affine_form: negative weight");
  require(c0.imag() >= -kEpsZero, "affine_form: constant below the real axis");
  int m = static_cast<int>(w.size());
  DensePoly p = DensePoly::constant(m, c0);
  for (int i = 0; i < m; ++i)
    if (w[i] != 0.0) p = p + Scalar(w[i]) * DensePoly::variable(m, i);
  return {p, {"affine-form"}};
}

inline CertifiedPoly product(const CertifiedPoly& f, const CertifiedPoly& g) {
  CertifiedPoly out;
  out.poly = f.poly * g.poly;
  out.derivation = f.derivation;
  out.derivation.insert(out.derivation.end(), g.derivation.begin(), g.derivation.end());
  out.derivation.push_back("product");
  return out;
}

inline CertifiedPoly differentiate(const CertifiedPoly& f, int i) {
  return {f.poly.derivative(i), chain(f.derivation, "differentiate(" + std::to_string(i) + ")")};
}

inline CertifiedPoly specialize(const CertifiedPoly& f, int i, Scalar a) {
  require(a.imag() >= -kEpsZero, "specialize: point below the closed upper half-plane is not certifiable");
  return {f.poly.specialize(i, a), chain(f.derivation, "specialize(" + std::to_string(i) + ")")};
}

inline CertifiedPoly diagonalize(const CertifiedPoly& f, int i, int j) {
  return {f.poly.diagonalize(i, j),
          chain(f.derivation, "diagonalize(" + std::to_string(i) + "," + std::to_string(j) + ")")};
}

inline CertifiedPoly invert(const CertifiedPoly& f, int i) {
  return {f.poly.invert(i), chain(f.derivation, "invert(" + std::to_string(i) + ")")};
}

inline CertifiedPoly permute(const CertifiedPoly& f, const std::vector<int>& sigma) {
  return {f.poly.permute(sigma), chain(f.derivation, "permute")};
}

inline CertifiedPoly scale(const CertifiedPoly& f, Scalar c, const PointR& a) {
  for (double ai : a) require(ai > 0.0, "scale: nonpositive variable scale is not certifiable");
  return {f.poly.scale_vars(c, a), chain(f.derivation, "scale")};
}

// h(x, y) = g + y f certified with y the last variable and deg_y h <= 1,
// deg_i f <= 1: output g - d_i f.
inline CertifiedPoly lieb_sokal(const CertifiedPoly& h, int i) {
  int y = h.poly.arity() - 1;
  require(y >= 1, "lieb_sokal: needs at least two variables");
  require(h.poly.deg(y) <= 1, "lieb_sokal: not affine in y");
  DensePoly g = h.poly.specialize(y, Scalar(0));
  DensePoly f = h.poly.derivative(y).specialize(y, Scalar(0));
  require(f.deg(i) <= 1, "lieb_sokal: deg_i(f) > 1");
  return {g - f.derivative(i), chain(h.derivation, "lieb-sokal(" + std::to_string(i) + ")")};
}

// Random product of single-variable affine factors (x_i + b_i), b_i > 0,
// possibly repeated variables; multiaffine when each variable is used at
// most once.
inline CertifiedPoly random_affine_product(Rng& rng, int m, int max_factors = 3) {
  CertifiedPoly acc = {DensePoly::constant(m, Scalar(rng.uniform(0.3, 2.0))), {"affine-form"}};
  int nf = rng.uniform_int(1, max_factors);
  std::vector<int> used;
  for (int k = 0; k < nf; ++k) {
    int i = rng.uniform_int(0, m - 1);
    bool dup = false;
    for (int u : used) dup |= (u == i);
    if (dup) continue;
    used.push_back(i);
    PointR w(m, 0.0);
    w[i] = rng.uniform(0.3, 2.0);
    acc = product(acc, affine_form(w, Scalar(rng.uniform(-2.0, 2.0), 0.0)));
  }
  return acc;
}

}  // namespace cert

// ---------------------------------------------------------------------------
// Construction DAG for the certify entry point.

struct Construction {
  enum class Node {
    Generator,      // leaf carrying a pre-built CertifiedPoly
    Product,
    Permute,
    Scale,
    Diagonalize,
    Specialize,
    Invert,
    Differentiate,
    LiebSokal,
  };

  Node node = Node::Generator;
  std::vector<Construction> children;
  CertifiedPoly generator;  // Node::Generator
  int i = 0, j = 0;
  Scalar value{};
  PointR avec;
  std::vector<int> sigma;

  static Construction leaf(CertifiedPoly g) {
    Construction c;
    c.node = Node::Generator;
    c.generator = std::move(g);
    return c;
  }
  static Construction unary(Node n, Construction child, int i = 0, int j = 0,
                            Scalar value = Scalar(0)) {
    Construction c;
    c.node = n;
    c.children.push_back(std::move(child));
    c.i = i;
    c.j = j;
    c.value = value;
    return c;
  }
};

struct CertifyResult {
  CertifiedPoly poly;
  StabilityVerdict verdict;
};

// Replays the construction, validating the side condition of every node;
// throws on any non-certifiable step.
inline CertifyResult certify(const Construction& c) {
  using Node = Construction::Node;
  CertifiedPoly out;
  switch (c.node) {
    case Node::Generator:
      out = c.generator;
      break;
    case Node::Product: {
      require(c.children.size() == 2, "certify: product needs two children");
      out = cert::product(certify(c.children[0]).poly, certify(c.children[1]).poly);
      break;
    }
    case Node::Permute:
      out = cert::permute(certify(c.children.at(0)).poly, c.sigma);
      break;
    case Node::Scale:
      out = cert::scale(certify(c.children.at(0)).poly, c.value, c.avec);
      break;
    case Node::Diagonalize:
      out = cert::diagonalize(certify(c.children.at(0)).poly, c.i, c.j);
      break;
    case Node::Specialize:
      out = cert::specialize(certify(c.children.at(0)).poly, c.i, c.value);
      break;
    case Node::Invert:
      out = cert::invert(certify(c.children.at(0)).poly, c.i);
      break;
    case Node::Differentiate:
      out = cert::differentiate(certify(c.children.at(0)).poly, c.i);
      break;
    case Node::LiebSokal:
      out = cert::lieb_sokal(certify(c.children.at(0)).poly, c.i);
      break;
  }
  return {out, out.verdict()};
}

// Variant that additionally checks the result against a claimed polynomial.
inline CertifyResult certify(const Construction& c, const DensePoly& claimed,
                             double tol = kEpsZero) {
  CertifyResult r = certify(c);
  require(approx_equal(r.poly.poly, claimed, tol), "certify: claimed polynomial differs");
  return r;
}

}  // namespace stablekit
