#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <functional>
#include <vector>

#include "stablekit/dense.hpp"
#include "stablekit/detpoly.hpp"
#include "stablekit/scalar.hpp"

namespace stablekit {

// G(d) = (1 - 1/d)^(d-1), G(0) = G(1) = 1; decreasing to 1/e.
inline double g_factor(int d) {
  require(d >= 0, "g_factor: negative degree");
  if (d <= 1) return 1.0;
  return std::pow(1.0 - 1.0 / d, d - 1);
}

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

struct CapacityReport {
  double cap_estimate = 0.0;
  PointR minimizer;        // c* > 0
  double gradient_norm = 0.0;  // sup norm at exit
  bool diverged = false;
  int iterations = 0;
};

namespace detail {

// First-order minimization of F(y) = logf(y) - sum y_i in log coordinates,
// convex for nonnegative coefficient polynomials.  Barzilai-Borwein steps
// with an Armijo backtracking safeguard; divergence of the iterate is the
// signal that the infimum is unattained (cap -> 0).
template <class LogF>
CapacityReport minimize_capacity(int m, LogF&& logf, double grad_tol = 1e-8,
                                 int max_iters = 200000) {
  PointR y(m, 0.0), grad(m, 0.0), prev_y, prev_grad;
  auto objective = [&](const PointR& yy, PointR& gg) {
    double F = logf(yy, gg);
    for (int i = 0; i < m; ++i) {
      F -= yy[i];
      gg[i] -= 1.0;
    }
    return F;
  };

  CapacityReport rep;
  double F = objective(y, grad);
  double step = 0.5;
  for (int it = 0; it < max_iters; ++it) {
    double gnorm = 0.0;
    for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
    rep.gradient_norm = gnorm;
    rep.iterations = it;
    double ynorm = 0.0;
    for (double v : y) ynorm = std::max(ynorm, std::abs(v));
    if (ynorm > 1e3) {
      rep.diverged = true;
      break;
    }
    if (gnorm <= grad_tol) break;

    if (it > 0) {
      // BB step from the last accepted move
      double sg = 0.0, gg = 0.0;
      for (int i = 0; i < m; ++i) {
        double dy = y[i] - prev_y[i], dg = grad[i] - prev_grad[i];
        sg += dy * dg;
        gg += dg * dg;
      }
      if (gg > 1e-300 && sg > 0) step = std::clamp(sg / gg, 1e-6, 1e3);
    }
    prev_y = y;
    prev_grad = grad;

    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    PointR trial(m);
    double t = step;
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i < m; ++i) trial[i] = y[i] - t * grad[i];
      PointR tg(m);
      double Ft = objective(trial, tg);
      if (Ft <= F - 0.25 * t * g2 + 1e-15) {
        y = trial;
        grad = tg;
        F = Ft;
        break;
      }
      t *= 0.5;
      if (bt == 59) {  // no progress possible at double precision
        rep.gradient_norm = 0.0;
        for (double g : grad) rep.gradient_norm = std::max(rep.gradient_norm, std::abs(g));
        rep.minimizer.assign(m, 0.0);
        for (int i = 0; i < m; ++i) rep.minimizer[i] = std::exp(y[i]);
        rep.cap_estimate = std::exp(F);
        return rep;
      }
    }
  }
  rep.minimizer.assign(m, 0.0);
  for (int i = 0; i < m; ++i) rep.minimizer[i] = std::exp(y[i]);
  rep.cap_estimate = std::exp(F);
  return rep;
}

struct LogTerm {
  std::vector<int> alpha;
  double logc;
};

inline std::vector<LogTerm> nonneg_support(const DensePoly& f) {
  std::vector<LogTerm> terms;
  for (const auto& pt : f.support(0.0)) {
    Scalar c = f.coeff(pt);
    require(std::abs(c.imag()) <= 1e-12 * (1 + std::abs(c)), "capacity: complex coefficient");
    double re = c.real();
    if (re < 0) {
      require(re >= -1e-12, "capacity: negative coefficient");
      continue;  // clamp tiny negatives to zero
    }
    if (re == 0.0) continue;
    terms.push_back({pt, std::log(re)});
  }
  require(!terms.empty(), "capacity: zero polynomial");
  return terms;
}

// log f(e^y) and its gradient by softmax over the support.
inline double logsumexp_eval(const std::vector<LogTerm>& terms, const PointR& y, PointR& grad) {
  const int m = static_cast<int>(y.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> ex(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    double e = terms[t].logc;
    for (int i = 0; i < m; ++i) e += terms[t].alpha[i] * y[i];
    ex[t] = e;
    best = std::max(best, e);
  }
  double Z = 0.0;
  for (double e : ex) Z += std::exp(e - best);
  double logF = best + std::log(Z);
  grad.assign(m, 0.0);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    double w = std::exp(ex[t] - logF);
    for (int i = 0; i < m; ++i) grad[i] += w * terms[t].alpha[i];
  }
  return logF;
}

}  // namespace detail

// cap(f) = inf over c > 0 of f(c) / (c_1 ... c_m), by convex minimization
// in log coordinates.  Coefficients must be nonnegative (tiny negatives
// are clamped).
inline CapacityReport cap(const DensePoly& f, double grad_tol = 1e-8) {
  auto terms = detail::nonneg_support(f);
  return detail::minimize_capacity(
      f.arity(),
      [&](const PointR& y, PointR& grad) { return detail::logsumexp_eval(terms, y, grad); },
      grad_tol);
}

struct BoundChain {
  double coeff = 0.0;              // coefficient of x_1...x_m
  double cap_value = 0.0;
  std::vector<double> g_factors;   // G(e_i) for i = 2..m
  double bound = 0.0;              // cap * prod G(e_i)
  double weak_bound = 0.0;         // (m!/m^m) * cap
  double slack = 0.0;              // coeff - bound
  CapacityReport cap_report;
};

// coeff(x_1...x_m) >= cap(f) * prod_{i=2}^m G(min(i, deg_i f)) for real
// stable f with nonnegative coefficients, homogeneous of degree m.
inline BoundChain bound_chain(const DensePoly& f) {
  const int m = f.arity();
  int deg = -1;
  require(f.is_homogeneous(&deg), "bound_chain: not homogeneous");
  require(deg == m, "bound_chain: degree must equal the variable count");
  BoundChain bc;
  bc.cap_report = cap(f);
  bc.cap_value = bc.cap_report.cap_estimate;
  double prod = 1.0;
  for (int i = 2; i <= m; ++i) {
    int e = std::min(i, f.deg(i - 1));
    double g = g_factor(e);
    bc.g_factors.push_back(g);
    prod *= g;
  }
  bc.bound = bc.cap_value * prod;
  bc.weak_bound = bc.cap_value * factorial(m) / std::pow(double(m), m);
  require(bc.bound >= bc.weak_bound - 1e-9 * (1.0 + bc.bound),
          "bound_chain: chain ordering violated");
  std::vector<int> ones(m, 1);
  Scalar c = f.coeff(ones);
  bc.coeff = c.real();
  bc.slack = bc.coeff - bc.bound;
  return bc;
}

struct EqualityCase {
  bool is_power_of_linear = false;
  PointR a;  // f = (a . x)^m when the flag is set
};

// Detects f = (a_1 x_1 + ... + a_m x_m)^m by reconstructing a_i from the
// pure powers and comparing coefficientwise.
inline EqualityCase equality_case(const DensePoly& f, double rel_tol = 1e-8) {
  const int m = f.arity();
  int deg = -1;
  require(f.is_homogeneous(&deg), "equality_case: not homogeneous");
  require(deg == m, "equality_case: degree must equal the variable count");
  EqualityCase ec;
  ec.a.assign(m, 0.0);
  std::vector<int> alpha(m, 0);
  for (int i = 0; i < m; ++i) {
    std::fill(alpha.begin(), alpha.end(), 0);
    alpha[i] = m;
    double ci = f.coeff(alpha).real();
    if (ci < 0) return ec;
    ec.a[i] = std::pow(ci, 1.0 / m);
  }
  double scale = std::max(1e-300, f.max_abs());
  // compare against the multinomial expansion
  std::vector<int> idx;
  DensePoly probe(m, std::vector<int>(m, m));
  for (long lin = 0; lin < probe.box_size(); ++lin) {
    probe.decompose(lin, idx);
    int total = 0;
    for (int v : idx) total += v;
    if (total != m) continue;
    double want = factorial(m);
    for (int v = 0; v < m; ++v) {
      want /= factorial(idx[v]);
      want *= std::pow(ec.a[v], idx[v]);
    }
    if (std::abs(f.coeff(idx).real() - want) > rel_tol * scale) return ec;
  }
  ec.is_power_of_linear = true;
  return ec;
}

// Permanent by the inclusion-exclusion formula with Gray-code updates of
// the row sums and compensated accumulation.  Exact up to floating
// rounding for n <= 20.
inline double permanent(const std::vector<std::vector<double>>& B) {
  const int n = static_cast<int>(B.size());
  require_cap(n <= 20, "permanent: dimension cap");
  for (const auto& row : B)
    require(static_cast<int>(row.size()) == n, "permanent: square matrix required");
  if (n == 0) return 1.0;
  std::vector<double> rowsum(n, 0.0);
  KahanSum total;
  std::uint32_t gray = 0;
  for (std::uint32_t k = 1; k < (std::uint32_t(1) << n); ++k) {
    std::uint32_t next = k ^ (k >> 1);
    std::uint32_t bit = gray ^ next;
    int j = std::countr_zero(bit);
    double sign = (next & bit) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) rowsum[i] += sign * B[i][j];
    gray = next;
    double prod = ((n - std::popcount(next)) % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) prod *= rowsum[i];
    total.add(prod);
  }
  return total.s;
}

struct SinkhornResult {
  std::vector<std::vector<double>> matrix;
  int sweeps = 0;
  double deviation = 0.0;  // max row/col sum deviation from 1
};

inline SinkhornResult sinkhorn(std::vector<std::vector<double>> B, double tol = 1e-10,
                               int max_sweeps = 100000) {
  const int n = static_cast<int>(B.size());
  for (const auto& row : B) {
    require(static_cast<int>(row.size()) == n, "sinkhorn: square matrix required");
    for (double v : row) require(v >= 0.0, "sinkhorn: negative entry");
  }
  SinkhornResult res;
  for (res.sweeps = 0; res.sweeps < max_sweeps; ++res.sweeps) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += B[i][j];
      require(s > 0.0, "sinkhorn: zero row");
      for (int j = 0; j < n; ++j) B[i][j] /= s;
    }
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += B[i][j];
      require(s > 0.0, "sinkhorn: zero column");
      for (int i = 0; i < n; ++i) B[i][j] /= s;
    }
    res.deviation = 0.0;
    for (int i = 0; i < n; ++i) {
      double rs = 0.0, cs = 0.0;
      for (int j = 0; j < n; ++j) {
        rs += B[i][j];
        cs += B[j][i];
      }
      res.deviation = std::max({res.deviation, std::abs(rs - 1.0), std::abs(cs - 1.0)});
    }
    if (res.deviation <= tol) break;
  }
  res.matrix = std::move(B);
  return res;
}

// Capacity of the column-product polynomial prod_j (col_j . x) without
// expanding it.
inline CapacityReport cap_product_form(const std::vector<std::vector<double>>& B,
                                       double grad_tol = 1e-8) {
  const int n = static_cast<int>(B.size());
  return detail::minimize_capacity(n, [&](const PointR& y, PointR& grad) {
    grad.assign(n, 0.0);
    double F = 0.0;
    for (int j = 0; j < n; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        if (B[i][j] > 0) best = std::max(best, std::log(B[i][j]) + y[i]);
      require(std::isfinite(best), "cap_product_form: zero column");
      double Z = 0.0;
      for (int i = 0; i < n; ++i)
        if (B[i][j] > 0) Z += std::exp(std::log(B[i][j]) + y[i] - best);
      double logcol = best + std::log(Z);
      F += logcol;
      for (int i = 0; i < n; ++i)
        if (B[i][j] > 0) grad[i] += std::exp(std::log(B[i][j]) + y[i] - logcol);
    }
    return F;
  }, grad_tol);
}

struct VdwReport {
  int m = 0;
  SinkhornResult scaling;
  CapacityReport cap_report;
  double per = 0.0;
  double bound = 0.0;   // m!/m^m
  double slack = 0.0;   // per - bound
  bool cap_is_one = false;
  bool bound_holds = false;
  bool equality = false;  // per == bound, attained exactly at the flat matrix
};

inline VdwReport vdw_suite(const std::vector<std::vector<double>>& B_in,
                           bool apply_sinkhorn = true) {
  VdwReport rep;
  rep.m = static_cast<int>(B_in.size());
  rep.scaling = apply_sinkhorn ? sinkhorn(B_in) : SinkhornResult{B_in, 0, 0.0};
  if (!apply_sinkhorn) {
    // certify the doubly stochastic hypothesis instead of scaling
    double dev = 0.0;
    for (int i = 0; i < rep.m; ++i) {
      double rs = 0.0, cs = 0.0;
      for (int j = 0; j < rep.m; ++j) {
        rs += B_in[i][j];
        cs += B_in[j][i];
      }
      dev = std::max({dev, std::abs(rs - 1.0), std::abs(cs - 1.0)});
    }
    rep.scaling.deviation = dev;
    require(dev <= 1e-8, "vdw_suite: matrix not doubly stochastic");
  }
  const auto& B = rep.scaling.matrix;
  rep.cap_report = cap_product_form(B);
  rep.cap_is_one = !rep.cap_report.diverged &&
                   std::abs(rep.cap_report.cap_estimate - 1.0) <= 1e-6;
  rep.per = permanent(B);
  rep.bound = factorial(rep.m) / std::pow(double(rep.m), rep.m);
  rep.slack = rep.per - rep.bound;
  rep.bound_holds = rep.slack >= -1e-9;
  double flat_dev = 0.0;
  for (int i = 0; i < rep.m; ++i)
    for (int j = 0; j < rep.m; ++j)
      flat_dev = std::max(flat_dev, std::abs(B[i][j] - 1.0 / rep.m));
  rep.equality = (std::abs(rep.slack) <= 1e-9) && (flat_dev <= 1e-8);
  return rep;
}

// Mixed discriminant: the x_1...x_m coefficient of det(x_1 A_1 + ...),
// expanded as a sum over column assignments.
inline double mixed_discriminant(const std::vector<CMatrix>& A) {
  const int m = static_cast<int>(A.size());
  require(m >= 1, "mixed_discriminant: empty tuple");
  const int n = static_cast<int>(A[0].rows());
  require(m == n, "mixed_discriminant: needs m = n");
  require_cap(n <= 8, "mixed_discriminant: dimension cap");
  for (const auto& M : A)
    require(M.rows() == n && M.cols() == n, "mixed_discriminant: shape mismatch");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  KahanSum re, im;
  double magnitude = 0.0;
  CMatrix M(n, n);
  do {
    for (int j = 0; j < n; ++j) M.col(j) = A[perm[j]].col(j);
    Scalar d = Eigen::PartialPivLU<CMatrix>(M).determinant();
    re.add(d.real());
    im.add(d.imag());
    magnitude += std::abs(d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  // individual summands are complex; the total is real for Hermitian input
  require(std::abs(im.s) <= 1e-9 * (1.0 + magnitude), "mixed_discriminant: imaginary residue");
  return re.s;
}

struct BapatReport {
  int m = 0;
  bool omega_member = false;     // PSD, unit traces, sum = I
  double disc = 0.0;
  double bound = 0.0;            // m!/m^m
  double slack = 0.0;
  bool bound_holds = false;
  CapacityReport cap_report;
  bool cap_is_one = false;
  EqualityCase equality;
};

inline BapatReport bapat_suite(const std::vector<HermitianMatrix>& A) {
  BapatReport rep;
  rep.m = static_cast<int>(A.size());
  require(rep.m >= 1, "bapat_suite: empty tuple");
  const int n = A[0].n();
  require(rep.m == n && n <= 6, "bapat_suite: needs m = n <= 6");
  CMatrix sum = CMatrix::Zero(n, n);
  rep.omega_member = true;
  for (const auto& Ai : A) {
    require(Ai.n() == n, "bapat_suite: shape mismatch");
    if (!Ai.is_psd()) rep.omega_member = false;
    if (std::abs(Ai.a.trace().real() - 1.0) > 1e-10) rep.omega_member = false;
    sum += Ai.a;
  }
  if ((sum - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10) rep.omega_member = false;
  require(rep.omega_member, "bapat_suite: tuple not in Omega(m)");

  std::vector<CMatrix> mats;
  for (const auto& Ai : A) mats.push_back(Ai.a);
  rep.disc = mixed_discriminant(mats);
  rep.bound = factorial(rep.m) / std::pow(double(rep.m), rep.m);
  rep.slack = rep.disc - rep.bound;
  rep.bound_holds = rep.slack >= -1e-9;

  rep.cap_report = detail::minimize_capacity(n, [&](const PointR& y, PointR& grad) {
    double shift = *std::max_element(y.begin(), y.end());
    CMatrix M = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) M += std::exp(y[i] - shift) * A[i].a;
    Eigen::PartialPivLU<CMatrix> lu(M);
    Scalar det = lu.determinant();
    require(std::abs(det) > 1e-300, "bapat_suite: singular pencil value");
    CMatrix Minv = lu.inverse();
    grad.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
      grad[i] = (Minv * A[i].a).trace().real() * std::exp(y[i] - shift);
    return std::log(std::abs(det)) + n * shift;
  });
  rep.cap_is_one = !rep.cap_report.diverged &&
                   std::abs(rep.cap_report.cap_estimate - 1.0) <= 1e-6;

  std::vector<HermitianMatrix> hs = A;
  MatrixPencil P(std::move(hs), HermitianMatrix(CMatrix::Zero(n, n)));
  rep.equality = equality_case(pencil_poly(P));
  return rep;
}

struct UniCapReport {
  double b1 = 0.0;       // f'(0)
  double cap_value = 0.0;
  double g = 0.0;        // G(d)
  double bound = 0.0;    // G(d) * cap
  bool holds = false;
  bool equality = false; // f = b_d (x + xi)^d
  double xi = 0.0;
};

// Univariate bound f'(0) >= G(d) cap(f), with the equality form detector.
inline UniCapReport cap_root_bound(const DensePoly& f) {
  require(f.arity() == 1, "cap_root_bound: univariate input required");
  DensePoly t = f.trimmed();
  for (const Scalar& c : t.coeffs())
    require(c.real() >= -1e-12 && std::abs(c.imag()) <= 1e-12,
            "cap_root_bound: negative coefficient");
  int d = t.deg(0);
  UniCapReport rep;
  rep.b1 = (d >= 1) ? t.coeff({1}).real() : 0.0;
  rep.g = g_factor(d);

  // golden-section on y = log c over a wide bracket; the objective is convex
  auto obj = [&](double y) {
    PointR grad(1);
    auto terms = detail::nonneg_support(t);
    return detail::logsumexp_eval(terms, PointR{y}, grad) - y;
  };
  double lo = -30.0, hi = 30.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = obj(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = obj(x2);
    }
  }
  rep.cap_value = std::exp(std::min(f1, f2));
  rep.bound = rep.g * rep.cap_value;
  rep.holds = rep.b1 >= rep.bound - 1e-9 * (1.0 + std::abs(rep.bound));

  if (d <= 1) {
    rep.equality = true;
    return rep;
  }
  double f0 = t.coeff({0}).real();
  if (f0 > 0 && rep.b1 > 0) {
    double xi = d * f0 / rep.b1;
    double bd = t.coeff({d}).real();
    bool match = bd > 0;
    for (int k = 0; k <= d && match; ++k) {
      double want = bd * static_cast<double>(binomial(d, k)) * std::pow(xi, d - k);
      if (std::abs(t.coeff({k}).real() - want) > 1e-8 * std::max(1.0, t.max_abs()))
        match = false;
    }
    if (match && xi > 0) {
      rep.equality = true;
      rep.xi = xi;
    }
  }
  return rep;
}

}  // namespace stablekit
