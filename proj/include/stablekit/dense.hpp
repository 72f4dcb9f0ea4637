#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "stablekit/scalar.hpp"

namespace stablekit {

// Degree-bounded multivariate polynomial stored as a full coefficient
// table over the box 0 <= alpha <= kappa.  Axis 0 has the smallest
// stride.  The box never shrinks implicitly; trimmed() is the explicit
// bound-reduction operation.
class DensePoly {
 public:
  DensePoly() : arity_(0), kappa_{}, coeffs_(1, Scalar(0)) { init_strides(); }

  DensePoly(int arity, std::vector<int> kappa)
      : arity_(arity), kappa_(std::move(kappa)) {
    require(arity_ >= 0, "DensePoly: negative arity");
    require(static_cast<int>(kappa_.size()) == arity_, "DensePoly: kappa size != arity");
    for (int k : kappa_) require(k >= 0, "DensePoly: negative degree bound");
    init_strides();
    coeffs_.assign(static_cast<std::size_t>(box_), Scalar(0));
  }

  static DensePoly constant(int arity, Scalar c) {
    DensePoly p(arity, std::vector<int>(arity, 0));
    p.coeffs_[0] = c;
    p.check_finite();
    return p;
  }

  static DensePoly variable(int arity, int i) {
    require(0 <= i && i < arity, "variable: index out of range");
    std::vector<int> kappa(arity, 0);
    kappa[i] = 1;
    DensePoly p(arity, kappa);
    p.coeffs_[p.strides_[i]] = Scalar(1);
    return p;
  }

  // Univariate polynomial from low-to-high coefficients.
  static DensePoly univariate(const std::vector<Scalar>& c) {
    int d = static_cast<int>(c.size()) - 1;
    if (d < 0) return constant(1, Scalar(0));
    DensePoly p(1, {d});
    p.coeffs_ = c;
    p.check_finite();
    return p;
  }

  int arity() const { return arity_; }
  const std::vector<int>& bounds() const { return kappa_; }
  long box_size() const { return box_; }
  const std::vector<Scalar>& coeffs() const { return coeffs_; }
  std::vector<Scalar>& coeffs_mut() { return coeffs_; }

  long index_of(std::span<const int> alpha) const {
    long idx = 0;
    for (int i = 0; i < arity_; ++i) {
      require(0 <= alpha[i], "multi-index negative");
      if (alpha[i] > kappa_[i]) return -1;
      idx += static_cast<long>(alpha[i]) * strides_[i];
    }
    return idx;
  }

  Scalar coeff(std::span<const int> alpha) const {
    long idx = index_of(alpha);
    return idx < 0 ? Scalar(0) : coeffs_[static_cast<std::size_t>(idx)];
  }
  Scalar coeff(std::initializer_list<int> alpha) const {
    return coeff(std::span<const int>(alpha.begin(), alpha.size()));
  }

  void set(std::span<const int> alpha, Scalar v) {
    require(is_finite(v), "coefficient not finite");
    long idx = index_of(alpha);
    require(idx >= 0, "multi-index outside box");
    coeffs_[static_cast<std::size_t>(idx)] = v;
  }
  void set(std::initializer_list<int> alpha, Scalar v) {
    set(std::span<const int>(alpha.begin(), alpha.size()), v);
  }

  void decompose(long idx, std::vector<int>& alpha) const {
    alpha.resize(arity_);
    for (int i = arity_ - 1; i >= 0; --i) {
      alpha[i] = static_cast<int>(idx / strides_[i]);
      idx %= strides_[i];
    }
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

  // Degree in variable i after epsilon-trimming.
  int deg(int i, double tol = kEpsZero) const {
    require(0 <= i && i < arity_, "deg: index out of range");
    for (int k = kappa_[i]; k >= 1; --k)
      if (!slice_zero(i, k, tol)) return k;
    return 0;
  }

  int total_degree(double tol = kEpsZero) const {
    int d = -1;
    std::vector<int> alpha;
    for (long idx = 0; idx < box_; ++idx) {
      if (std::abs(coeffs_[idx]) > tol) {
        decompose(idx, alpha);
        d = std::max(d, std::accumulate(alpha.begin(), alpha.end(), 0));
      }
    }
    return std::max(d, 0);
  }

  // Homogeneity check; on success reports the common total degree.
  bool is_homogeneous(int* degree_out = nullptr, double tol = kEpsZero) const {
    int d = -1;
    std::vector<int> alpha;
    for (long idx = 0; idx < box_; ++idx) {
      if (std::abs(coeffs_[idx]) > tol) {
        decompose(idx, alpha);
        int s = std::accumulate(alpha.begin(), alpha.end(), 0);
        if (d < 0) d = s;
        else if (s != d) return false;
      }
    }
    if (degree_out) *degree_out = std::max(d, 0);
    return true;
  }

  DensePoly trimmed(double tol = kEpsZero) const {
    std::vector<int> nk(arity_);
    for (int i = 0; i < arity_; ++i) nk[i] = deg(i, tol);
    DensePoly out(arity_, nk);
    std::vector<int> alpha;
    for (long idx = 0; idx < out.box_; ++idx) {
      out.decompose(idx, alpha);
      out.coeffs_[idx] = coeff(alpha);
    }
    return out;
  }

  Scalar evaluate(const PointC& z) const {
    require(static_cast<int>(z.size()) == arity_, "evaluate: arity mismatch");
    std::vector<Scalar> work(coeffs_);
    long len = box_;
    for (int ax = arity_ - 1; ax >= 0; --ax) {
      long stride = strides_[ax];
      int k = kappa_[ax];
      for (long j = 0; j < stride; ++j) {
        Scalar acc = work[j + static_cast<long>(k) * stride];
        for (int t = k - 1; t >= 0; --t) acc = acc * z[ax] + work[j + static_cast<long>(t) * stride];
        work[j] = acc;
      }
      len = stride;
    }
    Scalar r = work[0];
    require(is_finite(r), "evaluate: non-finite result");
    return r;
  }

  Scalar evaluate(const PointR& a) const { return evaluate(to_complex(a)); }

  // Sum of |c_alpha| * |z|^alpha; scale reference for residual tests.
  double evaluate_abs(const PointC& z) const {
    require(static_cast<int>(z.size()) == arity_, "evaluate_abs: arity mismatch");
    std::vector<int> alpha;
    double total = 0.0;
    for (long idx = 0; idx < box_; ++idx) {
      double t = std::abs(coeffs_[idx]);
      if (t == 0.0) continue;
      decompose(idx, alpha);
      for (int i = 0; i < arity_; ++i)
        for (int k = 0; k < alpha[i]; ++k) t *= std::abs(z[i]);
      total += t;
    }
    return total;
  }

  DensePoly& operator*=(Scalar c) {
    require(is_finite(c), "scale by non-finite");
    for (Scalar& v : coeffs_) v *= c;
    return *this;
  }
  friend DensePoly operator*(Scalar c, DensePoly p) {
    p *= c;
    return p;
  }

  friend DensePoly operator+(const DensePoly& f, const DensePoly& g) { return combine(f, g, 1.0); }
  friend DensePoly operator-(const DensePoly& f, const DensePoly& g) { return combine(f, g, -1.0); }

  friend DensePoly operator*(const DensePoly& f, const DensePoly& g) {
    require(f.arity_ == g.arity_, "mul: arity mismatch");
    std::vector<int> nk(f.arity_);
    long box = 1;
    for (int i = 0; i < f.arity_; ++i) {
      nk[i] = f.kappa_[i] + g.kappa_[i];
      box *= nk[i] + 1;
      require_cap(box <= kMaxDenseBox, "mul: box cap exceeded");
    }
    DensePoly out(f.arity_, nk);
    std::vector<int> af(f.arity_, 0), ag(f.arity_, 0);
    for (long i = 0; i < f.box_; ++i) {
      const Scalar cf = f.coeffs_[i];
      if (cf != Scalar(0)) {
        long base = 0;
        for (int v = 0; v < f.arity_; ++v) base += static_cast<long>(af[v]) * out.strides_[v];
        std::fill(ag.begin(), ag.end(), 0);
        long goff = 0;
        for (long j = 0; j < g.box_; ++j) {
          out.coeffs_[base + goff] += cf * g.coeffs_[j];
          for (int v = 0; v < g.arity_; ++v) {
            if (ag[v] < g.kappa_[v]) {
              ++ag[v];
              goff += out.strides_[v];
              break;
            }
            goff -= static_cast<long>(ag[v]) * out.strides_[v];
            ag[v] = 0;
          }
        }
      }
      for (int v = 0; v < f.arity_; ++v) {
        if (af[v] < f.kappa_[v]) {
          ++af[v];
          break;
        }
        af[v] = 0;
      }
    }
    return out;
  }

  DensePoly derivative(int i) const {
    require(0 <= i && i < arity_, "derivative: index out of range");
    std::vector<int> nk = kappa_;
    nk[i] = std::max(0, nk[i] - 1);
    DensePoly out(arity_, nk);
    std::vector<int> alpha;
    for (long idx = 0; idx < out.box_; ++idx) {
      out.decompose(idx, alpha);
      ++alpha[i];
      out.coeffs_[idx] = static_cast<double>(alpha[i]) * coeff(alpha);
    }
    return out;
  }

  // f |_{x_i = a}, dropping variable i (arity decreases by one).
  DensePoly specialize(int i, Scalar a) const {
    require(0 <= i && i < arity_, "specialize: index out of range");
    require(is_finite(a), "specialize: non-finite value");
    std::vector<int> nk;
    for (int v = 0; v < arity_; ++v)
      if (v != i) nk.push_back(kappa_[v]);
    DensePoly out(arity_ - 1, nk);
    std::vector<int> alpha, beta(arity_);
    for (long idx = 0; idx < out.box_; ++idx) {
      out.decompose(idx, alpha);
      for (int v = 0, w = 0; v < arity_; ++v) beta[v] = (v == i) ? 0 : alpha[w++];
      // Horner in x_i at a
      Scalar acc(0);
      for (int k = kappa_[i]; k >= 0; --k) {
        beta[i] = k;
        acc = acc * a + coeff(beta);
      }
      out.coeffs_[idx] = acc;
    }
    return out;
  }

  // f |_{x_i = x_j}, dropping variable i.
  DensePoly diagonalize(int i, int j) const {
    require(0 <= i && i < arity_ && 0 <= j && j < arity_ && i != j, "diagonalize: bad indices");
    std::vector<int> nk;
    for (int v = 0; v < arity_; ++v)
      if (v != i) nk.push_back(kappa_[v] + (v == j ? kappa_[i] : 0));
    DensePoly out(arity_ - 1, nk);
    std::vector<int> alpha, beta;
    for (long idx = 0; idx < box_; ++idx) {
      if (coeffs_[idx] == Scalar(0)) continue;
      decompose(idx, alpha);
      beta.clear();
      for (int v = 0; v < arity_; ++v)
        if (v != i) beta.push_back(alpha[v] + (v == j ? alpha[i] : 0));
      long oidx = out.index_of(beta);
      out.coeffs_[oidx] += coeffs_[idx];
    }
    return out;
  }

  // x_i^d f(..., -1/x_i, ...) with d the epsilon-trimmed degree in x_i.
  DensePoly invert(int i, double tol = kEpsZero) const {
    require(0 <= i && i < arity_, "invert: index out of range");
    int d = deg(i, tol);
    std::vector<int> nk = kappa_;
    nk[i] = d;
    DensePoly out(arity_, nk);
    std::vector<int> alpha;
    for (long idx = 0; idx < out.box_; ++idx) {
      out.decompose(idx, alpha);
      int k = alpha[i];
      alpha[i] = d - k;
      double sign = ((d - k) % 2 == 0) ? 1.0 : -1.0;
      out.coeffs_[idx] = sign * coeff(alpha);
    }
    return out;
  }

  // f(x_{sigma(1)}, ..., x_{sigma(m)}); sigma is a permutation of 0..m-1.
  DensePoly permute(const std::vector<int>& sigma) const {
    require(static_cast<int>(sigma.size()) == arity_, "permute: bad permutation size");
    std::vector<int> nk(arity_);
    for (int v = 0; v < arity_; ++v) nk[v] = kappa_[sigma[v]];
    DensePoly out(arity_, nk);
    std::vector<int> alpha, beta(arity_);
    for (long idx = 0; idx < out.box_; ++idx) {
      out.decompose(idx, alpha);
      for (int v = 0; v < arity_; ++v) beta[sigma[v]] = alpha[v];
      out.coeffs_[idx] = coeff(beta);
    }
    return out;
  }

  // c * f(a_1 x_1, ..., a_m x_m).
  DensePoly scale_vars(Scalar c, const PointR& a) const {
    require(static_cast<int>(a.size()) == arity_, "scale_vars: arity mismatch");
    DensePoly out(*this);
    std::vector<int> alpha;
    for (long idx = 0; idx < box_; ++idx) {
      out.decompose(idx, alpha);
      Scalar v = c * coeffs_[idx];
      for (int i = 0; i < arity_; ++i)
        for (int k = 0; k < alpha[i]; ++k) v *= a[i];
      out.coeffs_[idx] = v;
    }
    return out;
  }

  // Univariate t |-> f(a + b t).
  DensePoly restrict_line(const PointR& a, const PointR& b) const {
    require(static_cast<int>(a.size()) == arity_ && static_cast<int>(b.size()) == arity_,
            "restrict_line: arity mismatch");
    int dmax = 0;
    for (int k : kappa_) dmax += k;
    // Horner over axes with univariate-polynomial values.
    std::vector<std::vector<Scalar>> work(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) work[i] = {coeffs_[i]};
    for (int ax = arity_ - 1; ax >= 0; --ax) {
      long stride = strides_[ax];
      int k = kappa_[ax];
      Scalar aa(a[ax], 0.0), bb(b[ax], 0.0);
      for (long j = 0; j < stride; ++j) {
        std::vector<Scalar> acc = work[j + static_cast<long>(k) * stride];
        for (int t = k - 1; t >= 0; --t) {
          // acc = acc*(aa + bb*T) + work[j + t*stride]
          std::vector<Scalar> next(acc.size() + 1, Scalar(0));
          for (std::size_t q = 0; q < acc.size(); ++q) {
            next[q] += acc[q] * aa;
            next[q + 1] += acc[q] * bb;
          }
          const std::vector<Scalar>& add = work[j + static_cast<long>(t) * stride];
          for (std::size_t q = 0; q < add.size(); ++q) next[q] += add[q];
          acc = std::move(next);
        }
        work[j] = std::move(acc);
      }
    }
    std::vector<Scalar> res = work[0];
    res.resize(static_cast<std::size_t>(dmax) + 1, Scalar(0));
    return univariate(res);
  }

  // Replaces axis `ax` by a linear image: new coefficient slice l gets
  // sum_k M[l][k] * (old slice k).  Used by Moebius conjugation.
  DensePoly axis_linear_map(int ax, const std::vector<std::vector<Scalar>>& M) const {
    require(0 <= ax && ax < arity_, "axis_linear_map: index out of range");
    int new_k = static_cast<int>(M.size()) - 1;
    for (const auto& row : M)
      require(static_cast<int>(row.size()) == kappa_[ax] + 1, "axis_linear_map: bad matrix");
    std::vector<int> nk = kappa_;
    nk[ax] = new_k;
    DensePoly out(arity_, nk);
    std::vector<int> alpha, beta;
    for (long idx = 0; idx < out.box_; ++idx) {
      out.decompose(idx, alpha);
      int l = alpha[ax];
      Scalar acc(0);
      beta = alpha;
      for (int k = 0; k <= kappa_[ax]; ++k) {
        if (M[l][k] == Scalar(0)) continue;
        beta[ax] = k;
        acc += M[l][k] * coeff(beta);
      }
      out.coeffs_[idx] = acc;
    }
    return out;
  }

  std::vector<std::vector<int>> support(double tol = kEpsZero) const {
    std::vector<std::vector<int>> pts;
    std::vector<int> alpha;
    for (long idx = 0; idx < box_; ++idx) {
      if (std::abs(coeffs_[idx]) > tol) {
        decompose(idx, alpha);
        pts.push_back(alpha);
      }
    }
    return pts;
  }

  void check_finite() const {
    for (const Scalar& c : coeffs_)
      require(is_finite(c), "DensePoly: non-finite coefficient");
  }

 private:
  void init_strides() {
    strides_.resize(arity_);
    box_ = 1;
    for (int i = 0; i < arity_; ++i) {
      strides_[i] = box_;
      box_ *= kappa_[i] + 1;
      require_cap(box_ <= kMaxDenseBox, "DensePoly: box cap exceeded");
    }
  }

  bool slice_zero(int i, int k, double tol) const {
    std::vector<int> alpha;
    for (long idx = 0; idx < box_; ++idx) {
      if ((idx / strides_[i]) % (kappa_[i] + 1) == k && std::abs(coeffs_[idx]) > tol)
        return false;
    }
    return true;
  }

  static DensePoly combine(const DensePoly& f, const DensePoly& g, double sg) {
    require(f.arity_ == g.arity_, "add: arity mismatch");
    std::vector<int> nk(f.arity_);
    for (int i = 0; i < f.arity_; ++i) nk[i] = std::max(f.kappa_[i], g.kappa_[i]);
    DensePoly out(f.arity_, nk);
    std::vector<int> alpha;
    for (long idx = 0; idx < out.box_; ++idx) {
      out.decompose(idx, alpha);
      out.coeffs_[idx] = f.coeff(alpha) + sg * g.coeff(alpha);
    }
    return out;
  }

  int arity_;
  std::vector<int> kappa_;
  std::vector<long> strides_;
  long box_ = 1;
  std::vector<Scalar> coeffs_;
};

// Canonical equality: coefficientwise within tol over the union box.
inline bool approx_equal(const DensePoly& f, const DensePoly& g, double tol = kEpsZero) {
  if (f.arity() != g.arity()) return false;
  return (f - g).is_zero(tol);
}

}  // namespace stablekit
