#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "stablekit/dense.hpp"
#include "stablekit/scalar.hpp"

namespace stablekit {

// Multiaffine polynomial on m <= 24 variables: one coefficient per
// subset S of [m], indexed by bitmask.
class MultiAffinePoly {
 public:
  MultiAffinePoly() : m_(0), coeffs_(1, Scalar(0)) {}

  explicit MultiAffinePoly(int m) : m_(m) {
    require(0 <= m && m <= kMaxMultiAffineArity, "MultiAffinePoly: arity out of range");
    coeffs_.assign(std::size_t(1) << m, Scalar(0));
  }

  static MultiAffinePoly constant(int m, Scalar c) {
    MultiAffinePoly p(m);
    p.coeffs_[0] = c;
    p.check_finite();
    return p;
  }

  static MultiAffinePoly variable(int m, int i) {
    require(0 <= i && i < m, "variable: index out of range");
    MultiAffinePoly p(m);
    p.coeffs_[std::uint32_t(1) << i] = Scalar(1);
    return p;
  }

  int arity() const { return m_; }
  std::size_t table_size() const { return coeffs_.size(); }
  const std::vector<Scalar>& coeffs() const { return coeffs_; }

  Scalar coeff(std::uint32_t mask) const { return coeffs_[mask]; }
  void set(std::uint32_t mask, Scalar v) {
    require(is_finite(v), "coefficient not finite");
    require(mask < coeffs_.size(), "set: mask out of range");
    coeffs_[mask] = v;
  }

  bool is_zero(double tol = kEpsZero) const {
    for (const Scalar& c : coeffs_)
      if (std::abs(c) > tol) return false;
    return true;
  }

  bool is_real(double tol = kEpsZero) const {
    for (const Scalar& c : coeffs_)
      if (std::abs(c.imag()) > tol) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (const Scalar& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  Scalar evaluate(const PointC& z) const {
    require(static_cast<int>(z.size()) == m_, "evaluate: arity mismatch");
    std::vector<Scalar> work(coeffs_);
    for (int v = 0; v < m_; ++v) {
      std::uint32_t bit = std::uint32_t(1) << v;
      for (std::uint32_t s = 0; s < work.size(); ++s)
        if (!(s & bit)) work[s] += z[v] * work[s | bit];
    }
    Scalar r = work[0];
    require(is_finite(r), "evaluate: non-finite result");
    return r;
  }

  Scalar evaluate(const PointR& a) const { return evaluate(to_complex(a)); }

  double evaluate_abs(const PointC& z) const {
    double total = 0.0;
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s) {
      double t = std::abs(coeffs_[s]);
      if (t == 0.0) continue;
      for (int v = 0; v < m_; ++v)
        if (s & (std::uint32_t(1) << v)) t *= std::abs(z[v]);
      total += t;
    }
    return total;
  }

  MultiAffinePoly& operator*=(Scalar c) {
    require(is_finite(c), "scale by non-finite");
    for (Scalar& v : coeffs_) v *= c;
    return *this;
  }
  friend MultiAffinePoly operator*(Scalar c, MultiAffinePoly p) {
    p *= c;
    return p;
  }
  friend MultiAffinePoly operator+(MultiAffinePoly f, const MultiAffinePoly& g) {
    require(f.m_ == g.m_, "add: arity mismatch");
    for (std::size_t i = 0; i < f.coeffs_.size(); ++i) f.coeffs_[i] += g.coeffs_[i];
    return f;
  }
  friend MultiAffinePoly operator-(MultiAffinePoly f, const MultiAffinePoly& g) {
    require(f.m_ == g.m_, "sub: arity mismatch");
    for (std::size_t i = 0; i < f.coeffs_.size(); ++i) f.coeffs_[i] -= g.coeffs_[i];
    return f;
  }

  // f_i = d f / d x_i, kept at the same arity (variable i becomes absent).
  MultiAffinePoly derivative_keep(int i) const {
    require(0 <= i && i < m_, "derivative: index out of range");
    MultiAffinePoly out(m_);
    std::uint32_t bit = std::uint32_t(1) << i;
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s)
      if (!(s & bit)) out.coeffs_[s] = coeffs_[s | bit];
    return out;
  }

  // f^i = f |_{x_i = 0}, same arity.
  MultiAffinePoly at_zero_keep(int i) const {
    require(0 <= i && i < m_, "at_zero: index out of range");
    MultiAffinePoly out(m_);
    std::uint32_t bit = std::uint32_t(1) << i;
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s)
      if (!(s & bit)) out.coeffs_[s] = coeffs_[s];
    return out;
  }

  // f |_{x_i = a} with variable i dropped (arity m-1).
  MultiAffinePoly specialize(int i, Scalar a) const {
    require(0 <= i && i < m_, "specialize: index out of range");
    require(is_finite(a), "specialize: non-finite value");
    MultiAffinePoly out(m_ - 1);
    std::uint32_t bit = std::uint32_t(1) << i;
    std::uint32_t low = bit - 1;
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s) {
      if (s & bit) continue;
      std::uint32_t t = (s & low) | ((s & ~low & ~bit) >> 1);
      out.coeffs_[t] = coeffs_[s] + a * coeffs_[s | bit];
    }
    return out;
  }

  // Drops variable i entirely; requires it to be absent.
  MultiAffinePoly drop_absent(int i, double tol = kEpsZero) const {
    require(degree_in(i, tol) == 0, "drop_absent: variable occurs");
    return specialize(i, Scalar(0));
  }

  int degree_in(int i, double tol = kEpsZero) const {
    std::uint32_t bit = std::uint32_t(1) << i;
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s)
      if ((s & bit) && std::abs(coeffs_[s]) > tol) return 1;
    return 0;
  }

  // x_i^d f(..., -1/x_i, ...) for multiaffine f: d ∈ {0, 1}.
  MultiAffinePoly invert(int i, double tol = kEpsZero) const {
    require(0 <= i && i < m_, "invert: index out of range");
    if (degree_in(i, tol) == 0) return *this;
    MultiAffinePoly out(m_);
    std::uint32_t bit = std::uint32_t(1) << i;
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s) {
      if (s & bit) continue;
      out.coeffs_[s | bit] = coeffs_[s];
      out.coeffs_[s] = -coeffs_[s | bit];
    }
    return out;
  }

  MultiAffinePoly swap_vars(int i, int j) const {
    require(0 <= i && i < m_ && 0 <= j && j < m_, "swap: index out of range");
    if (i == j) return *this;
    MultiAffinePoly out(m_);
    std::uint32_t bi = std::uint32_t(1) << i, bj = std::uint32_t(1) << j;
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s) {
      std::uint32_t t = s;
      bool hi = s & bi, hj = s & bj;
      if (hi != hj) t = (s ^ bi) ^ bj;
      out.coeffs_[t] = coeffs_[s];
    }
    return out;
  }

  MultiAffinePoly permute(const std::vector<int>& sigma) const {
    require(static_cast<int>(sigma.size()) == m_, "permute: bad permutation size");
    MultiAffinePoly out(m_);
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s) {
      std::uint32_t t = 0;
      for (int v = 0; v < m_; ++v)
        if (s & (std::uint32_t(1) << v)) t |= std::uint32_t(1) << sigma[v];
      out.coeffs_[t] = coeffs_[s];
    }
    return out;
  }

  MultiAffinePoly scale_vars(Scalar c, const PointR& a) const {
    require(static_cast<int>(a.size()) == m_, "scale_vars: arity mismatch");
    MultiAffinePoly out(m_);
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s) {
      Scalar v = c * coeffs_[s];
      for (int i = 0; i < m_; ++i)
        if (s & (std::uint32_t(1) << i)) v *= a[i];
      out.coeffs_[s] = v;
    }
    return out;
  }

  // g(x) = f(x, x, ..., x); coefficient of x^k is the level-k sum.
  DensePoly diagonal_restriction() const {
    std::vector<Scalar> g(static_cast<std::size_t>(m_) + 1, Scalar(0));
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s)
      g[std::popcount(s)] += coeffs_[s];
    return DensePoly::univariate(g);
  }

  DensePoly to_dense() const {
    require_cap(m_ <= 22, "to_dense: box cap exceeded");
    DensePoly out(m_, std::vector<int>(m_, 1));
    std::vector<int> alpha(m_);
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s) {
      for (int v = 0; v < m_; ++v) alpha[v] = (s >> v) & 1;
      out.set(alpha, coeffs_[s]);
    }
    return out;
  }

  static MultiAffinePoly from_dense(const DensePoly& d, double tol = kEpsZero) {
    int m = d.arity();
    require(m <= kMaxMultiAffineArity, "from_dense: arity out of range");
    MultiAffinePoly out(m);
    std::vector<int> alpha;
    for (const auto& pt : d.support(0.0)) {
      int over = 0;
      for (int v = 0; v < m; ++v) over = std::max(over, pt[v]);
      if (over > 1) {
        require(std::abs(d.coeff(pt)) <= tol, "from_dense: not multiaffine");
        continue;
      }
      std::uint32_t s = 0;
      for (int v = 0; v < m; ++v)
        if (pt[v]) s |= std::uint32_t(1) << v;
      out.coeffs_[s] = d.coeff(pt);
    }
    return out;
  }

  DensePoly restrict_line(const PointR& a, const PointR& b) const {
    require(static_cast<int>(a.size()) == m_ && static_cast<int>(b.size()) == m_,
            "restrict_line: arity mismatch");
    // Fold variables one at a time; table entries are univariate polys in t.
    std::vector<std::vector<Scalar>> work(coeffs_.size());
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s) work[s] = {coeffs_[s]};
    for (int v = m_ - 1; v >= 0; --v) {
      std::uint32_t bit = std::uint32_t(1) << v;
      Scalar aa(a[v], 0.0), bb(b[v], 0.0);
      for (std::uint32_t s = 0; s < (std::uint32_t(1) << v); ++s) {
        const std::vector<Scalar>& hi = work[s | bit];
        std::vector<Scalar> acc(hi.size() + 1, Scalar(0));
        for (std::size_t q = 0; q < hi.size(); ++q) {
          acc[q] += hi[q] * aa;
          acc[q + 1] += hi[q] * bb;
        }
        const std::vector<Scalar>& lo = work[s];
        if (acc.size() < lo.size()) acc.resize(lo.size(), Scalar(0));
        for (std::size_t q = 0; q < lo.size(); ++q) acc[q] += lo[q];
        work[s] = std::move(acc);
      }
    }
    std::vector<Scalar> res = work[0];
    res.resize(static_cast<std::size_t>(m_) + 1, Scalar(0));
    return DensePoly::univariate(res);
  }

  std::vector<std::uint32_t> support(double tol = kEpsZero) const {
    std::vector<std::uint32_t> masks;
    for (std::uint32_t s = 0; s < coeffs_.size(); ++s)
      if (std::abs(coeffs_[s]) > tol) masks.push_back(s);
    return masks;
  }

  void check_finite() const {
    for (const Scalar& c : coeffs_)
      require(is_finite(c), "MultiAffinePoly: non-finite coefficient");
  }

 private:
  int m_;
  std::vector<Scalar> coeffs_;
};

inline bool approx_equal(const MultiAffinePoly& f, const MultiAffinePoly& g,
                         double tol = kEpsZero) {
  if (f.arity() != g.arity()) return false;
  for (std::size_t s = 0; s < f.table_size(); ++s)
    if (std::abs(f.coeff(static_cast<std::uint32_t>(s)) - g.coeff(static_cast<std::uint32_t>(s))) > tol)
      return false;
  return true;
}

}  // namespace stablekit
