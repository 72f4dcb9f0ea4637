#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "stablekit/dense.hpp"
#include "stablekit/multiaffine.hpp"
#include "stablekit/ops.hpp"
#include "stablekit/rng.hpp"
#include "stablekit/roots.hpp"
#include "stablekit/verdict.hpp"

namespace stablekit {

namespace detail {

struct ProbeLine {
  PointR a, b;
};

// Deterministic probe schedule drawn up front: results do not depend on
// how the lines are later split across workers.  Line 0 is always the
// center ray a = 0, b = 1.
inline std::vector<ProbeLine> probe_schedule(int m, int n_probes, std::uint64_t seed) {
  std::vector<ProbeLine> lines;
  lines.reserve(n_probes);
  if (n_probes > 0) lines.push_back({PointR(m, 0.0), PointR(m, 1.0)});
  Rng rng(seed);
  for (int k = 1; k < n_probes; ++k) {
    ProbeLine ln;
    ln.a.resize(m);
    ln.b.resize(m);
    for (int i = 0; i < m; ++i) {
      ln.a[i] = rng.cauchy();
      ln.b[i] = rng.log_uniform(-3.0, 3.0);
    }
    lines.push_back(std::move(ln));
  }
  return lines;
}

// Re-check a candidate witness against the original polynomial.
template <class Poly>
bool verify_witness(const Poly& f, const PointC& w, const RegionSpec& region) {
  for (int i = 0; i < f.arity(); ++i)
    if (!region.interior(i, w[i])) return false;
  double scale = 1.0 + f.evaluate_abs(w);
  return std::abs(f.evaluate(w)) <= 1e-8 * scale;
}

// Guards against eigensolver artifacts: a real root of multiplicity k
// splits into a cluster of spurious complex roots of height ~eps^(1/k),
// but leaves only rounding noise in |r| at its real shadow, whereas a
// genuine conjugate pair at height h leaves |r(shadow)| of order h^2.
inline bool genuine_upper_root(const DensePoly& r, Scalar t) {
  if (t.imag() <= 1e-7 * std::max(1.0, std::abs(t))) return false;
  PointC shadow{Scalar(t.real(), 0.0)};
  double val = std::abs(r.evaluate(shadow));
  double scale = r.evaluate_abs(shadow) + 1e-300;
  return val > 1e-9 * scale;
}

// Roots of the univariate restriction lying in the open upper half-plane,
// mapped back through the line and the region maps; first verified witness
// wins.  Returns nullopt when the line shows nothing.
template <class Poly>
std::optional<PointC> falsify_on_line(const Poly& original, const DensePoly& conjugated,
                                      const ProbeLine& ln, const RegionSpec& region) {
  const int m = conjugated.arity();
  DensePoly r = conjugated.restrict_line(ln.a, ln.b);
  double rscale = r.max_abs();
  double fscale = std::max(1.0, conjugated.max_abs());
  auto map_back = [&](Scalar t) {
    PointC w(m);
    for (int i = 0; i < m; ++i) {
      Scalar z = Scalar(ln.a[i], 0.0) + Scalar(ln.b[i], 0.0) * t;
      w[i] = region.map_for(i).apply(z);
    }
    return w;
  };
  if (rscale <= kEpsZero * fscale) {
    // restriction vanishes identically: the whole line lies in the zero set
    PointC w = map_back(Scalar(0.0, 1.0));
    if (verify_witness(original, w, region)) return w;
    return std::nullopt;
  }
  RootList rl = roots(r);
  for (const Scalar& t : rl.roots) {
    if (!genuine_upper_root(r, t)) continue;
    PointC w = map_back(t);
    if (verify_witness(original, w, region)) return w;
  }
  return std::nullopt;
}

template <class Poly>
DensePoly conjugate_for_region(const Poly& f, const RegionSpec& region);

inline DensePoly conjugate_for_region_dense(const DensePoly& f, const RegionSpec& region) {
  if (region.is_half_plane()) return f;
  DensePoly g = f.trimmed();
  std::vector<MoebiusMap> maps(g.arity());
  std::vector<int> degs(g.arity());
  for (int i = 0; i < g.arity(); ++i) {
    maps[i] = region.map_for(i);
    degs[i] = g.bounds()[i];
  }
  return moebius_conjugate(g, maps, degs);
}

}  // namespace detail

// Randomized falsification of stability over region^m by line probes
// (restrictions are stable on every admissible line iff the polynomial
// is stable).  Never answers "stable": a clean run is only ProbePassed.
inline StabilityVerdict probe_stable(const DensePoly& f, int n_probes = 200,
                                     std::uint64_t seed = 0x5EED,
                                     const RegionSpec& region = RegionSpec::upper_half_plane()) {
  if (f.is_zero()) return StabilityVerdict::certified({});
  if (f.total_degree() == 0) return StabilityVerdict::certified({"constant"});
  DensePoly g = detail::conjugate_for_region_dense(f, region);
  auto lines = detail::probe_schedule(f.arity(), n_probes, seed);
  for (const auto& ln : lines) {
    auto w = detail::falsify_on_line(f, g, ln, region);
    if (w) return StabilityVerdict::falsified(*w);
  }
  return StabilityVerdict::probe_passed(n_probes, seed);
}

inline StabilityVerdict probe_stable(const MultiAffinePoly& f, int n_probes = 200,
                                     std::uint64_t seed = 0x5EED,
                                     const RegionSpec& region = RegionSpec::upper_half_plane()) {
  if (f.is_zero()) return StabilityVerdict::certified({});
  if (f.support().size() == 1 && f.support()[0] == 0)
    return StabilityVerdict::certified({"constant"});
  if (region.is_half_plane()) {
    // native multiaffine line restriction; no dense conversion
    auto lines = detail::probe_schedule(f.arity(), n_probes, seed);
    for (const auto& ln : lines) {
      DensePoly r = f.restrict_line(ln.a, ln.b);
      double rscale = r.max_abs();
      if (rscale <= kEpsZero * std::max(1.0, f.max_abs())) {
        PointC w(f.arity());
        for (int i = 0; i < f.arity(); ++i) w[i] = Scalar(ln.a[i], ln.b[i]);
        if (detail::verify_witness(f, w, region)) return StabilityVerdict::falsified(w);
        continue;
      }
      RootList rl = roots(r);
      for (const Scalar& t : rl.roots) {
        if (!detail::genuine_upper_root(r, t)) continue;
        PointC w(f.arity());
        for (int i = 0; i < f.arity(); ++i) w[i] = Scalar(ln.a[i], 0.0) + Scalar(ln.b[i], 0.0) * t;
        if (detail::verify_witness(f, w, region)) return StabilityVerdict::falsified(w);
      }
    }
    return StabilityVerdict::probe_passed(n_probes, seed);
  }
  return probe_stable(f.to_dense(), n_probes, seed, region);
}

// Real-stability test for real multiaffine polynomials through the
// parameterized quadratic criterion: f is real stable iff Delta_ij f >= 0
// on all of R^m for every pair.  Falsification samples a deterministic
// coarse grid plus Cauchy-tailed batches.
inline StabilityVerdict delta_real_stable(const MultiAffinePoly& f, int n_batches = 64,
                                          std::uint64_t seed = 0x5EED) {
  require(f.is_real(), "delta_real_stable: real input required");
  const int m = f.arity();
  if (f.is_zero()) return StabilityVerdict::certified({});
  if (m <= 1) return StabilityVerdict::certified({"real-affine"});

  Rng rng(seed ^ 0xD417A);
  const int batch_size = 16;
  static const double grid_vals[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};

  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      MultiAffinePoly fi = f.derivative_keep(i);
      MultiAffinePoly fj = f.derivative_keep(j);
      MultiAffinePoly fij = fi.derivative_keep(j);
      auto delta_at = [&](const PointR& a) {
        double vfi = fi.evaluate(a).real();
        double vfj = fj.evaluate(a).real();
        double vf = f.evaluate(a).real();
        double vfij = fij.evaluate(a).real();
        double val = vfi * vfj - vf * vfij;
        double mag = std::abs(vfi * vfj) + std::abs(vf * vfij) + 1.0;
        return std::pair<double, double>(val, mag);
      };
      auto check = [&](const PointR& a) -> std::optional<StabilityVerdict> {
        auto [val, mag] = delta_at(a);
        if (val < -kEpsZero * mag) {
          StabilityVerdict v = StabilityVerdict::falsified(to_complex(a));
          v.pair_i = i;
          v.pair_j = j;
          v.violation = val;
          return v;
        }
        return std::nullopt;
      };

      long grid_total = 1;
      for (int v = 0; v < m && grid_total <= 4096; ++v) grid_total *= 5;
      PointR a(m);
      if (grid_total <= 4096) {
        std::vector<int> idx(m, 0);
        for (long g = 0; g < grid_total; ++g) {
          for (int v = 0; v < m; ++v) a[v] = grid_vals[idx[v]];
          if (auto bad = check(a)) return *bad;
          for (int v = 0; v < m; ++v) {
            if (++idx[v] < 5) break;
            idx[v] = 0;
          }
        }
      } else {
        for (int g = 0; g < 4096; ++g) {
          for (int v = 0; v < m; ++v) a[v] = grid_vals[rng.uniform_int(0, 4)];
          if (auto bad = check(a)) return *bad;
        }
      }
      for (int batch = 0; batch < n_batches; ++batch) {
        for (int k = 0; k < batch_size; ++k) {
          for (int v = 0; v < m; ++v) a[v] = rng.cauchy();
          if (auto bad = check(a)) return *bad;
        }
      }
    }
  }
  return StabilityVerdict::probe_passed(n_batches, seed);
}

// g - d_i f.  Sound transformation when g + y f is stable and f is
// affine in x_i.
inline DensePoly lieb_sokal(const DensePoly& g, const DensePoly& f, int i) {
  require(g.arity() == f.arity(), "lieb_sokal: arity mismatch");
  require(f.deg(i) <= 1, "lieb_sokal: deg_i(f) > 1");
  return g - f.derivative(i);
}

// ---------------------------------------------------------------------------
// Linear transformations on the degree box kappa, given by their action
// on monomials.

class LinOpSpec {
 public:
  LinOpSpec(int arity, std::vector<int> kappa, int out_arity)
      : arity_(arity), kappa_(std::move(kappa)), out_arity_(out_arity),
        shape_(arity_, kappa_) {
    images_.assign(static_cast<std::size_t>(shape_.box_size()),
                   DensePoly::constant(out_arity_, Scalar(0)));
  }

  static LinOpSpec multiaffine(int m, int out_arity) {
    return LinOpSpec(m, std::vector<int>(m, 1), out_arity);
  }

  int arity() const { return arity_; }
  int out_arity() const { return out_arity_; }
  const std::vector<int>& kappa() const { return kappa_; }
  long box() const { return shape_.box_size(); }

  void set_image(std::span<const int> alpha, DensePoly img) {
    require(img.arity() == out_arity_, "LinOpSpec: image arity mismatch");
    long idx = shape_.index_of(alpha);
    require(idx >= 0, "LinOpSpec: monomial outside box");
    images_[static_cast<std::size_t>(idx)] = std::move(img);
  }
  void set_image(std::initializer_list<int> alpha, DensePoly img) {
    set_image(std::span<const int>(alpha.begin(), alpha.size()), std::move(img));
  }

  const DensePoly& image(long idx) const { return images_[static_cast<std::size_t>(idx)]; }
  const DensePoly& image(std::span<const int> alpha) const {
    long idx = shape_.index_of(alpha);
    require(idx >= 0, "LinOpSpec: monomial outside box");
    return images_[static_cast<std::size_t>(idx)];
  }

  void monomial_of(long idx, std::vector<int>& alpha) const { shape_.decompose(idx, alpha); }

  DensePoly apply(const DensePoly& f) const {
    require(f.arity() == arity_, "LinOpSpec: apply arity mismatch");
    for (int i = 0; i < arity_; ++i)
      require(f.deg(i) <= kappa_[i], "LinOpSpec: input exceeds degree box");
    DensePoly out = DensePoly::constant(out_arity_, Scalar(0));
    std::vector<int> alpha;
    for (long idx = 0; idx < shape_.box_size(); ++idx) {
      shape_.decompose(idx, alpha);
      Scalar c = f.coeff(alpha);
      if (c != Scalar(0)) out = out + c * images_[static_cast<std::size_t>(idx)];
    }
    return out;
  }

 private:
  int arity_;
  std::vector<int> kappa_;
  int out_arity_;
  DensePoly shape_;  // zero poly on the box; reused for indexing
  std::vector<DensePoly> images_;
};

enum class SymbolSign { Plus, Minus };

// T((x ± y)^kappa) = sum_{alpha <= kappa} binom(kappa, alpha) T(x^alpha)
// (±1)^{|kappa - alpha|} y^{kappa - alpha}, a polynomial in out_arity + m
// variables (the T-image variables first, then y).
inline DensePoly symbol(const LinOpSpec& T, SymbolSign sign = SymbolSign::Plus) {
  const int m = T.arity();
  const int ox = T.out_arity();
  std::vector<int> out_bounds(ox, 0);
  std::vector<int> alpha;
  for (long idx = 0; idx < T.box(); ++idx)
    for (int v = 0; v < ox; ++v)
      out_bounds[v] = std::max(out_bounds[v], T.image(idx).bounds()[v]);
  std::vector<int> bounds = out_bounds;
  bounds.insert(bounds.end(), T.kappa().begin(), T.kappa().end());
  DensePoly out(ox + m, bounds);
  std::vector<int> full(ox + m);
  for (long idx = 0; idx < T.box(); ++idx) {
    T.monomial_of(idx, alpha);
    double mult = 1.0;
    int codeg = 0;
    for (int v = 0; v < m; ++v) {
      mult *= static_cast<double>(binomial(T.kappa()[v], alpha[v]));
      codeg += T.kappa()[v] - alpha[v];
    }
    if (sign == SymbolSign::Minus && codeg % 2 == 1) mult = -mult;
    const DensePoly& img = T.image(idx);
    for (const auto& pt : img.support(0.0)) {
      for (int v = 0; v < ox; ++v) full[v] = pt[v];
      for (int v = 0; v < m; ++v) full[ox + v] = T.kappa()[v] - alpha[v];
      out.set(full, out.coeff(full) + mult * img.coeff(pt));
    }
  }
  return out;
}

// T((1 + x y)^kappa) = sum binom(kappa, alpha) T(x^alpha) y^alpha; the
// certificate polynomial for Schur/Hurwitz preservation questions.
inline DensePoly product_symbol(const LinOpSpec& T) {
  const int m = T.arity();
  const int ox = T.out_arity();
  std::vector<int> out_bounds(ox, 0);
  std::vector<int> alpha;
  for (long idx = 0; idx < T.box(); ++idx)
    for (int v = 0; v < ox; ++v)
      out_bounds[v] = std::max(out_bounds[v], T.image(idx).bounds()[v]);
  std::vector<int> bounds = out_bounds;
  bounds.insert(bounds.end(), T.kappa().begin(), T.kappa().end());
  DensePoly out(ox + m, bounds);
  std::vector<int> full(ox + m);
  for (long idx = 0; idx < T.box(); ++idx) {
    T.monomial_of(idx, alpha);
    double mult = 1.0;
    for (int v = 0; v < m; ++v) mult *= static_cast<double>(binomial(T.kappa()[v], alpha[v]));
    const DensePoly& img = T.image(idx);
    for (const auto& pt : img.support(0.0)) {
      for (int v = 0; v < ox; ++v) full[v] = pt[v];
      for (int v = 0; v < m; ++v) full[ox + v] = alpha[v];
      out.set(full, out.coeff(full) + mult * img.coeff(pt));
    }
  }
  return out;
}

enum class PreserverKind { RankOneForm, SymbolStable, SymbolFalsified };

struct PreserverClass {
  PreserverKind kind;
  StabilityVerdict symbol_verdict;  // for the two symbol cases
};

enum class StabilityNotion { HalfPlane, Schur, Hurwitz };

// Degenerate rank-one transformations are decided exactly first; the two
// cases of the symbol characterization overlap in floating point.
inline bool rank_one_form(const LinOpSpec& T, double tol = kEpsZero) {
  long pivot = -1;
  for (long idx = 0; idx < T.box(); ++idx) {
    if (T.image(idx).max_abs() > tol) {
      pivot = idx;
      break;
    }
  }
  if (pivot < 0) return true;  // zero transformation
  const DensePoly& v = T.image(pivot);
  // pivot entry of maximal modulus
  auto vsupp = v.support(tol);
  std::vector<int> pt = vsupp[0];
  for (const auto& q : vsupp)
    if (std::abs(v.coeff(q)) > std::abs(v.coeff(pt))) pt = q;
  double scale = v.max_abs();
  for (long idx = 0; idx < T.box(); ++idx) {
    if (idx == pivot) continue;
    const DensePoly& w = T.image(idx);
    Scalar r = w.coeff(pt) / v.coeff(pt);
    double wscale = std::max(scale * std::abs(r), scale);
    if (!approx_equal(w, r * v, tol * std::max(1.0, wscale))) return false;
  }
  return true;
}

inline PreserverClass classify_preserver(const LinOpSpec& T, int n_probes = 200,
                                         std::uint64_t seed = 0x5EED,
                                         StabilityNotion notion = StabilityNotion::HalfPlane) {
  if (rank_one_form(T)) return {PreserverKind::RankOneForm, {}};
  DensePoly s = (notion == StabilityNotion::HalfPlane) ? symbol(T, SymbolSign::Plus)
                                                       : product_symbol(T);
  RegionSpec region = RegionSpec::upper_half_plane();
  if (notion == StabilityNotion::Schur) region = RegionSpec::unit_disc();
  if (notion == StabilityNotion::Hurwitz) region = RegionSpec::right_half_plane();
  StabilityVerdict v = probe_stable(s, n_probes, seed, region);
  if (v.falsified_p()) return {PreserverKind::SymbolFalsified, v};
  return {PreserverKind::SymbolStable, v};
}

}  // namespace stablekit
