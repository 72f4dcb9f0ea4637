#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "stablekit/certify.hpp"
#include "stablekit/multiaffine.hpp"
#include "stablekit/rng.hpp"
#include "stablekit/stability.hpp"

namespace stablekit {

// Probability distribution on {0,1}^m, the state of a finite exclusion
// process.  States are bitmasks; probabilities a full table.
struct CubeDistribution {
  int m = 0;
  std::vector<double> probs;

  CubeDistribution() = default;
  CubeDistribution(int sites, std::vector<double> p) : m(sites), probs(std::move(p)) {
    require(0 <= m && m <= 12, "CubeDistribution: site cap");
    require(probs.size() == (std::size_t(1) << m), "CubeDistribution: table size");
    double sum = 0.0;
    for (double v : probs) {
      require(v >= -1e-12, "CubeDistribution: negative probability");
      sum += v;
    }
    require(std::abs(sum - 1.0) <= 1e-10, "CubeDistribution: mass not 1");
  }

  static CubeDistribution point_mass(int sites, std::uint32_t state) {
    std::vector<double> p(std::size_t(1) << sites, 0.0);
    p.at(state) = 1.0;
    return CubeDistribution(sites, std::move(p));
  }

  double mass() const {
    double s = 0.0;
    for (double v : probs) s += v;
    return s;
  }

  MultiAffinePoly partition_function() const {
    MultiAffinePoly Z(m);
    for (std::uint32_t s = 0; s < probs.size(); ++s) Z.set(s, Scalar(probs[s]));
    return Z;
  }

  double total_variation(const CubeDistribution& other) const {
    require(m == other.m, "total_variation: size mismatch");
    double d = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s) d += std::abs(probs[s] - other.probs[s]);
    return 0.5 * d;
  }
};

// ---------------------------------------------------------------------------
// Endofunctions of the cube, acting on distributions by pushforward and on
// partition functions by monomial substitution.  The two actions satisfy
// Z(f(phi)) = f(Z(phi)).

namespace sepdetail {

inline std::uint32_t act_tau(std::uint32_t s, int i, int j) {
  bool bi = s & (std::uint32_t(1) << i), bj = s & (std::uint32_t(1) << j);
  if (bi != bj) s = (s ^ (std::uint32_t(1) << i)) ^ (std::uint32_t(1) << j);
  return s;
}
inline std::uint32_t act_hop(std::uint32_t s, int from, int to) {
  bool bi = s & (std::uint32_t(1) << from), bj = s & (std::uint32_t(1) << to);
  if (bi && !bj) s = (s ^ (std::uint32_t(1) << from)) | (std::uint32_t(1) << to);
  return s;
}
inline std::uint32_t act_annihilate(std::uint32_t s, int i) {
  return s & ~(std::uint32_t(1) << i);
}
inline std::uint32_t act_create(std::uint32_t s, int i) {
  return s | (std::uint32_t(1) << i);
}

template <class Map>
std::vector<double> pushforward(const std::vector<double>& p, Map&& f) {
  std::vector<double> out(p.size(), 0.0);
  for (std::uint32_t s = 0; s < p.size(); ++s) out[f(s)] += p[s];
  return out;
}

template <class Map>
MultiAffinePoly poly_action(const MultiAffinePoly& Z, Map&& f) {
  MultiAffinePoly out(Z.arity());
  for (std::uint32_t s = 0; s < Z.table_size(); ++s) {
    Scalar c = Z.coeff(s);
    if (c != Scalar(0)) {
      std::uint32_t t = f(s);
      out.set(t, out.coeff(t) + c);
    }
  }
  return out;
}

}  // namespace sepdetail

inline CubeDistribution apply_tau(const CubeDistribution& phi, int i, int j) {
  require(0 <= i && i < phi.m && 0 <= j && j < phi.m && i != j, "apply_tau: bad sites");
  return CubeDistribution(phi.m, sepdetail::pushforward(phi.probs, [&](std::uint32_t s) {
                            return sepdetail::act_tau(s, i, j);
                          }));
}
inline CubeDistribution apply_hop(const CubeDistribution& phi, int from, int to) {
  require(0 <= from && from < phi.m && 0 <= to && to < phi.m && from != to,
          "apply_hop: bad sites");
  return CubeDistribution(phi.m, sepdetail::pushforward(phi.probs, [&](std::uint32_t s) {
                            return sepdetail::act_hop(s, from, to);
                          }));
}
inline CubeDistribution apply_annihilate(const CubeDistribution& phi, int i) {
  require(0 <= i && i < phi.m, "apply_annihilate: bad site");
  return CubeDistribution(phi.m, sepdetail::pushforward(phi.probs, [&](std::uint32_t s) {
                            return sepdetail::act_annihilate(s, i);
                          }));
}
inline CubeDistribution apply_create(const CubeDistribution& phi, int i) {
  require(0 <= i && i < phi.m, "apply_create: bad site");
  return CubeDistribution(phi.m, sepdetail::pushforward(phi.probs, [&](std::uint32_t s) {
                            return sepdetail::act_create(s, i);
                          }));
}

inline MultiAffinePoly apply_tau(const MultiAffinePoly& Z, int i, int j) {
  return sepdetail::poly_action(Z, [&](std::uint32_t s) { return sepdetail::act_tau(s, i, j); });
}
inline MultiAffinePoly apply_hop(const MultiAffinePoly& Z, int from, int to) {
  return sepdetail::poly_action(Z, [&](std::uint32_t s) { return sepdetail::act_hop(s, from, to); });
}
inline MultiAffinePoly apply_annihilate(const MultiAffinePoly& Z, int i) {
  return sepdetail::poly_action(Z, [&](std::uint32_t s) { return sepdetail::act_annihilate(s, i); });
}
inline MultiAffinePoly apply_create(const MultiAffinePoly& Z, int i) {
  return sepdetail::poly_action(Z, [&](std::uint32_t s) { return sepdetail::act_create(s, i); });
}

// Generator: symmetric swap edges, optional directed hops, creation and
// annihilation rates per site.  The symmetric part alone is the process
// whose evolution provably preserves stability of partition functions.
struct SEPGenerator {
  struct Edge {
    int i, j;
    double rate;
  };
  struct Hop {
    int from, to;
    double rate;
  };
  std::vector<Edge> edges;
  std::vector<Hop> hops;
  std::vector<double> create;      // theta*_i >= 0, indexed by site (may be empty)
  std::vector<double> annihilate;  // theta_i >= 0

  void validate(int m) const {
    for (const auto& e : edges) {
      require(0 <= e.i && e.i < m && 0 <= e.j && e.j < m && e.i != e.j, "SEP edge: bad sites");
      require(e.rate > 0 && std::isfinite(e.rate), "SEP edge: bad rate");
    }
    for (const auto& h : hops) {
      require(0 <= h.from && h.from < m && 0 <= h.to && h.to < m && h.from != h.to,
              "SEP hop: bad sites");
      require(h.rate > 0 && std::isfinite(h.rate), "SEP hop: bad rate");
    }
    require(create.empty() || static_cast<int>(create.size()) == m, "SEP create: size");
    require(annihilate.empty() || static_cast<int>(annihilate.size()) == m,
            "SEP annihilate: size");
    for (double v : create) require(v >= 0 && std::isfinite(v), "SEP create: bad rate");
    for (double v : annihilate) require(v >= 0 && std::isfinite(v), "SEP annihilate: bad rate");
  }

  bool symmetric_only() const { return hops.empty(); }

  // flattened (rate, endofunction) terms
  std::vector<std::pair<double, std::function<std::uint32_t(std::uint32_t)>>> terms() const {
    std::vector<std::pair<double, std::function<std::uint32_t(std::uint32_t)>>> out;
    for (const auto& e : edges)
      out.push_back({e.rate, [i = e.i, j = e.j](std::uint32_t s) {
                       return sepdetail::act_tau(s, i, j);
                     }});
    for (const auto& h : hops)
      out.push_back({h.rate, [f = h.from, t = h.to](std::uint32_t s) {
                       return sepdetail::act_hop(s, f, t);
                     }});
    for (std::size_t i = 0; i < create.size(); ++i)
      if (create[i] > 0)
        out.push_back({create[i], [i](std::uint32_t s) {
                         return sepdetail::act_create(s, static_cast<int>(i));
                       }});
    for (std::size_t i = 0; i < annihilate.size(); ++i)
      if (annihilate[i] > 0)
        out.push_back({annihilate[i], [i](std::uint32_t s) {
                         return sepdetail::act_annihilate(s, static_cast<int>(i));
                       }});
    return out;
  }
};

// exp(tL) phi by uniformization: with Lambda the total rate, P the mixture
// of the endofunction pushforwards, the series sum_n Pois(Lambda t, n) P^n
// is truncated once the Poisson tail drops below 1e-12.
inline CubeDistribution evolve(const CubeDistribution& phi0, const SEPGenerator& L, double t) {
  require(t >= 0.0 && std::isfinite(t), "evolve: negative time");
  L.validate(phi0.m);
  auto terms = L.terms();
  if (t == 0.0 || terms.empty()) return phi0;
  double Lambda = 0.0;
  for (const auto& [rate, fn] : terms) Lambda += rate;

  auto applyP = [&](const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    for (const auto& [rate, fn] : terms) {
      double w = rate / Lambda;
      for (std::uint32_t s = 0; s < v.size(); ++s) out[fn(s)] += w * v[s];
    }
    return out;
  };

  double mu = Lambda * t;
  std::vector<double> acc(phi0.probs.size(), 0.0), v = phi0.probs;
  double logw = -mu;  // log Poisson(mu, 0)
  double covered = 0.0;
  for (int n = 0;; ++n) {
    double w = std::exp(logw);
    for (std::size_t s = 0; s < v.size(); ++s) acc[s] += w * v[s];
    covered += w;
    if (covered >= 1.0 - 1e-12) break;
    require(n < 100000, "evolve: truncation overflow");
    v = applyP(v);
    logw += std::log(mu) - std::log(double(n + 1));
  }
  double drift = std::abs(1.0 - covered);
  double sum = 0.0;
  for (double x : acc) sum += x;
  require(std::abs(sum - 1.0) <= 1e-10 + drift, "evolve: mass drift");
  for (double& x : acc) x /= sum;
  return CubeDistribution(phi0.m, std::move(acc));
}

// Closed-form single-term step: every generator endofunction here is an
// involution or idempotent, so exp(t lambda (K - 1)) mixes the identity
// with K at explicit weights.
inline CubeDistribution evolve_single_edge(const CubeDistribution& phi, int i, int j,
                                           double lambda, double t) {
  double w = 0.5 * (1.0 - std::exp(-2.0 * lambda * t));
  CubeDistribution swapped = apply_tau(phi, i, j);
  std::vector<double> p(phi.probs.size());
  for (std::size_t s = 0; s < p.size(); ++s)
    p[s] = (1.0 - w) * phi.probs[s] + w * swapped.probs[s];
  return CubeDistribution(phi.m, std::move(p));
}

// Factorized stepping: one closed-form factor per generator term, `steps`
// rounds of t/steps.  Converges to the exact semigroup as O(1/steps).
inline CubeDistribution evolve_trotter(const CubeDistribution& phi0, const SEPGenerator& L,
                                       double t, int steps) {
  require(steps >= 1, "evolve_trotter: steps");
  L.validate(phi0.m);
  double dt = t / steps;
  CubeDistribution phi = phi0;
  for (int k = 0; k < steps; ++k) {
    for (const auto& e : L.edges) phi = evolve_single_edge(phi, e.i, e.j, e.rate, dt);
    for (const auto& h : L.hops) {
      double w = 1.0 - std::exp(-h.rate * dt);
      CubeDistribution moved = apply_hop(phi, h.from, h.to);
      for (std::size_t s = 0; s < phi.probs.size(); ++s)
        phi.probs[s] = (1.0 - w) * phi.probs[s] + w * moved.probs[s];
    }
    auto point_terms = [&](const std::vector<double>& rates, bool creating) {
      for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] <= 0) continue;
        double w = 1.0 - std::exp(-rates[i] * dt);
        CubeDistribution moved = creating ? apply_create(phi, static_cast<int>(i))
                                          : apply_annihilate(phi, static_cast<int>(i));
        for (std::size_t s = 0; s < phi.probs.size(); ++s)
          phi.probs[s] = (1.0 - w) * phi.probs[s] + w * moved.probs[s];
      }
    };
    point_terms(L.create, true);
    point_terms(L.annihilate, false);
  }
  return phi;
}

// ---------------------------------------------------------------------------
// Negative correlation / negative association.

struct NcReport {
  bool holds = true;
  double worst = 0.0;  // max Pr[ij] - Pr[i]Pr[j]
  int worst_i = -1, worst_j = -1;
};

inline NcReport check_nc(const CubeDistribution& phi, double tol = 1e-12) {
  NcReport rep;
  std::vector<double> marg(phi.m, 0.0);
  for (std::uint32_t s = 0; s < phi.probs.size(); ++s)
    for (int i = 0; i < phi.m; ++i)
      if (s & (std::uint32_t(1) << i)) marg[i] += phi.probs[s];
  for (int i = 0; i < phi.m; ++i) {
    for (int j = i + 1; j < phi.m; ++j) {
      double both = 0.0;
      std::uint32_t mask = (std::uint32_t(1) << i) | (std::uint32_t(1) << j);
      for (std::uint32_t s = 0; s < phi.probs.size(); ++s)
        if ((s & mask) == mask) both += phi.probs[s];
      double margin = both - marg[i] * marg[j];
      if (margin > rep.worst) {
        rep.worst = margin;
        rep.worst_i = i;
        rep.worst_j = j;
      }
    }
  }
  rep.holds = rep.worst <= tol;
  return rep;
}

// Monotone (increasing) event supported on a set of sites: an
// upward-closed family of subsets of the support.
struct MonotoneEvent {
  std::vector<int> support;              // site indices
  std::vector<std::uint32_t> members;    // subsets of the support, local bits

  void validate() const {
    int k = static_cast<int>(support.size());
    std::vector<bool> in(std::size_t(1) << k, false);
    for (std::uint32_t a : members) {
      require(a < (std::uint32_t(1) << k), "MonotoneEvent: member outside support");
      in[a] = true;
    }
    for (std::uint32_t a = 0; a < in.size(); ++a) {
      if (!in[a]) continue;
      for (int b = 0; b < k; ++b)
        require(in[a | (std::uint32_t(1) << b)], "MonotoneEvent: not upward closed");
    }
  }
};

// All upward-closed families on k local sites (2, 3, 6, 20, 168 for
// k = 0..4); brute force over subsets of the local cube.
inline std::vector<std::vector<std::uint32_t>> enumerate_upward_closed(int k) {
  require(0 <= k && k <= 4, "enumerate_upward_closed: support cap");
  int cube = 1 << k;
  std::vector<std::vector<std::uint32_t>> out;
  for (std::uint32_t family = 0; family < (std::uint32_t(1) << cube); ++family) {
    bool ok = true;
    for (int a = 0; a < cube && ok; ++a) {
      if (!(family & (std::uint32_t(1) << a))) continue;
      for (int b = 0; b < k && ok; ++b) {
        int up = a | (1 << b);
        if (!(family & (std::uint32_t(1) << up))) ok = false;
      }
    }
    if (!ok) continue;
    std::vector<std::uint32_t> members;
    for (int a = 0; a < cube; ++a)
      if (family & (std::uint32_t(1) << a)) members.push_back(a);
    out.push_back(std::move(members));
  }
  return out;
}

struct NaReport {
  bool holds = true;
  double worst = 0.0;
  int pairs_checked = 0;
};

// Exhaustive negative-association check for one partition (A, B) of the
// sites: every pair of increasing events supported on A and B.
inline NaReport check_na(const CubeDistribution& phi, const std::vector<int>& A,
                         const std::vector<int>& B, double tol = 1e-12) {
  std::vector<bool> seen(phi.m, false);
  for (int i : A) {
    require(0 <= i && i < phi.m && !seen[i], "check_na: partition not disjoint");
    seen[i] = true;
  }
  for (int i : B) {
    require(0 <= i && i < phi.m && !seen[i], "check_na: partition not disjoint");
    seen[i] = true;
  }
  for (int i = 0; i < phi.m; ++i) require(seen[i], "check_na: partition not covering");
  require(A.size() <= 4 && B.size() <= 4, "check_na: exhaustive mode caps supports at 4");

  const int ka = static_cast<int>(A.size()), kb = static_cast<int>(B.size());
  std::vector<std::vector<double>> M(std::size_t(1) << ka,
                                     std::vector<double>(std::size_t(1) << kb, 0.0));
  for (std::uint32_t s = 0; s < phi.probs.size(); ++s) {
    std::uint32_t a = 0, b = 0;
    for (int v = 0; v < ka; ++v)
      if (s & (std::uint32_t(1) << A[v])) a |= std::uint32_t(1) << v;
    for (int v = 0; v < kb; ++v)
      if (s & (std::uint32_t(1) << B[v])) b |= std::uint32_t(1) << v;
    M[a][b] += phi.probs[s];
  }

  auto upA = enumerate_upward_closed(ka);
  auto upB = enumerate_upward_closed(kb);
  NaReport rep;
  for (const auto& fa : upA) {
    std::vector<double> row(std::size_t(1) << kb, 0.0);
    double prA = 0.0;
    for (std::uint32_t a : fa)
      for (std::uint32_t b = 0; b < row.size(); ++b) {
        row[b] += M[a][b];
        prA += M[a][b];
      }
    for (const auto& fb : upB) {
      double joint = 0.0, prB = 0.0;
      for (std::uint32_t b : fb) joint += row[b];
      for (std::uint32_t b : fb)
        for (std::uint32_t a = 0; a < M.size(); ++a) prB += M[a][b];
      double margin = joint - prA * prB;
      rep.worst = std::max(rep.worst, margin);
      ++rep.pairs_checked;
    }
  }
  rep.holds = rep.worst <= tol;
  return rep;
}

// Rayleigh test: Delta_ij f >= 0 over the positive orthant, probed with
// log-uniform samples plus a positive coarse grid.
inline StabilityVerdict rayleigh_check(const MultiAffinePoly& f, int n_batches = 64,
                                       std::uint64_t seed = 0x5EED) {
  require(f.is_real(), "rayleigh_check: real input required");
  for (std::uint32_t s = 0; s < f.table_size(); ++s)
    require(f.coeff(s).real() >= -kEpsZero, "rayleigh_check: negative coefficient");
  const int m = f.arity();
  if (m <= 1 || f.is_zero()) return StabilityVerdict::certified({"real-affine"});

  Rng rng(seed ^ 0x9A71);
  static const double grid_vals[5] = {0.25, 0.5, 1.0, 2.0, 4.0};
  const int batch_size = 16;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      MultiAffinePoly fi = f.derivative_keep(i);
      MultiAffinePoly fj = f.derivative_keep(j);
      MultiAffinePoly fij = fi.derivative_keep(j);
      auto check = [&](const PointR& a) -> std::optional<StabilityVerdict> {
        double vfi = fi.evaluate(a).real(), vfj = fj.evaluate(a).real();
        double vf = f.evaluate(a).real(), vfij = fij.evaluate(a).real();
        double val = vfi * vfj - vf * vfij;
        double mag = std::abs(vfi * vfj) + std::abs(vf * vfij) + 1.0;
        if (val < -kEpsZero * mag) {
          StabilityVerdict v = StabilityVerdict::falsified(to_complex(a));
          v.pair_i = i;
          v.pair_j = j;
          v.violation = val;
          return v;
        }
        return std::nullopt;
      };
      PointR a(m);
      long grid_total = 1;
      for (int v = 0; v < m && grid_total <= 4096; ++v) grid_total *= 5;
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
      for (int batch = 0; batch < n_batches; ++batch)
        for (int k = 0; k < batch_size; ++k) {
          for (int v = 0; v < m; ++v) a[v] = rng.log_uniform(-3.0, 3.0);
          if (auto bad = check(a)) return *bad;
        }
    }
  }
  return StabilityVerdict::probe_passed(n_batches, seed);
}

// The size-biased reweighting phi^a(S) proportional to phi(S) a^S.
inline CubeDistribution reweight(const CubeDistribution& phi, const PointR& a) {
  require(static_cast<int>(a.size()) == phi.m, "reweight: arity mismatch");
  for (double v : a) require(v > 0, "reweight: nonpositive weight");
  std::vector<double> p(phi.probs.size());
  double Z = 0.0;
  for (std::uint32_t s = 0; s < p.size(); ++s) {
    double w = phi.probs[s];
    for (int i = 0; i < phi.m; ++i)
      if (s & (std::uint32_t(1) << i)) w *= a[i];
    p[s] = w;
    Z += w;
  }
  require(Z > 0, "reweight: zero mass");
  for (double& v : p) v /= Z;
  return CubeDistribution(phi.m, std::move(p));
}

// The four closure hypotheses behind "NC implies NA" for a class of
// distributions, run as a checklist on one member.  The membership oracle
// decides hypothesis (iii) for the specialized and contracted partition
// functions; hypothesis (iv) is verified on sampled positive reweightings
// (the full statement quantifies over all of them).
struct FederMihailReport {
  bool finite_domain = true;   // (i): structural here
  bool homogeneous = false;    // (ii)
  bool closed_class = true;    // (iii)
  bool reweighted_nc = true;   // (iv), sampled
  int samples = 0;
  bool all() const { return finite_domain && homogeneous && closed_class && reweighted_nc; }
};

inline FederMihailReport feder_mihail_check(
    const CubeDistribution& phi,
    const std::function<bool(const MultiAffinePoly&)>& class_member, int n_samples,
    std::uint64_t seed) {
  FederMihailReport rep;
  MultiAffinePoly Z = phi.partition_function();
  int deg = -1;
  rep.homogeneous = Z.to_dense().is_homogeneous(&deg);
  for (int i = 0; i < phi.m; ++i) {
    MultiAffinePoly zi = Z.at_zero_keep(i);
    MultiAffinePoly di = Z.derivative_keep(i);
    if (!zi.is_zero() && !class_member(zi)) rep.closed_class = false;
    if (!di.is_zero() && !class_member(di)) rep.closed_class = false;
  }
  Rng rng(seed);
  rep.samples = n_samples;
  for (int k = 0; k < n_samples; ++k) {
    PointR a(phi.m);
    for (double& v : a) v = rng.log_uniform(-2.0, 2.0);
    if (!check_nc(reweight(phi, a)).holds) rep.reweighted_nc = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Transport suite: evolve, probe the partition function, check NC and
// exhaustive NA at each requested time.

struct TransportPoint {
  double t = 0.0;
  StabilityVerdict z_verdict;
  NcReport nc;
  NaReport na;  // worst over the supplied partitions
  int partitions = 0;
};

struct TransportReport {
  bool initial_positive = false;  // Z(phi_0) not falsified
  std::vector<TransportPoint> points;
  bool clean(double na_tol = 1e-12) const {
    if (!initial_positive) return false;
    for (const auto& p : points)
      if (p.z_verdict.falsified_p() || !p.nc.holds || p.na.worst > na_tol) return false;
    return true;
  }
};

inline std::vector<std::pair<std::vector<int>, std::vector<int>>> default_partitions(int m) {
  std::vector<std::pair<std::vector<int>, std::vector<int>>> parts;
  require(m <= 8, "default_partitions: site cap");
  for (std::uint32_t mask = 1; mask + 1 < (std::uint32_t(1) << m); ++mask) {
    std::vector<int> A, B;
    for (int i = 0; i < m; ++i)
      (mask & (std::uint32_t(1) << i) ? A : B).push_back(i);
    if (A.size() > 4 || B.size() > 4) continue;
    if (A.size() > B.size() || (A.size() == B.size() && A[0] != 0)) continue;  // one per split
    parts.push_back({A, B});
  }
  return parts;
}

inline TransportReport stability_transport_suite(
    const CubeDistribution& phi0, const SEPGenerator& L, const std::vector<double>& times,
    int n_probes = 200, std::uint64_t seed = 0x5EED,
    std::vector<std::pair<std::vector<int>, std::vector<int>>> partitions = {}) {
  TransportReport rep;
  if (partitions.empty()) partitions = default_partitions(phi0.m);
  rep.initial_positive = probe_stable(phi0.partition_function(), n_probes, seed).positive();
  for (double t : times) {
    CubeDistribution phi = evolve(phi0, L, t);
    TransportPoint pt;
    pt.t = t;
    pt.z_verdict = probe_stable(phi.partition_function(), n_probes, seed ^ std::hash<double>{}(t));
    pt.nc = check_nc(phi);
    pt.partitions = static_cast<int>(partitions.size());
    for (const auto& [A, B] : partitions) {
      NaReport na = check_na(phi, A, B);
      pt.na.pairs_checked += na.pairs_checked;
      pt.na.worst = std::max(pt.na.worst, na.worst);
      pt.na.holds = pt.na.holds && na.holds;
    }
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Asymmetric two-site semigroup and its stability falsifier.

// e^{-lambda t} Z + (1 - e^{-lambda t}) (beta12 hop(i->j) + beta21 hop(j->i)) Z
inline MultiAffinePoly asymmetric_step(const MultiAffinePoly& Z, int i, int j, double beta12,
                                       double t, double lambda = 1.0) {
  double e = std::exp(-lambda * t);
  MultiAffinePoly out = Scalar(e) * Z;
  out = out + Scalar((1.0 - e) * beta12) * apply_hop(Z, i, j);
  out = out + Scalar((1.0 - e) * (1.0 - beta12)) * apply_hop(Z, j, i);
  return out;
}

struct AsymmetryWitness {
  bool found = false;
  int trials = 0;
  MultiAffinePoly input;       // certified stable
  MultiAffinePoly image;       // unstable image under the semigroup
  StabilityVerdict falsifier;  // witness for the image
};

// Randomized search over certified-stable multiaffine inputs (products of
// single-variable affine factors, biased toward symmetric two-site pairs)
// whose image under the asymmetric semigroup is falsified.  beta12 = 1/2
// is allowed here only so the null case can be measured; the public entry
// point rejects it.
inline AsymmetryWitness asymmetry_search(double beta12, double t, int budget,
                                         std::uint64_t seed, int probes_per_trial = 24) {
  require(0.0 <= beta12 && beta12 <= 1.0, "asymmetry: beta12 outside [0,1]");
  require(t > 0.0, "asymmetry: time must be positive");
  Rng rng(seed);
  AsymmetryWitness out;
  for (out.trials = 1; out.trials <= budget; ++out.trials) {
    int m = rng.uniform_int(2, 4);
    CertifiedPoly Z;
    int family = rng.uniform_int(0, 2);
    if (family == 0) {
      // symmetric pair (x_0 + a)(x_1 + a) times spare positives
      double a = rng.log_uniform(-1.5, 1.5);
      PointR w0(m, 0.0), w1(m, 0.0);
      w0[0] = 1.0;
      w1[1] = 1.0;
      Z = cert::product(cert::affine_form(w0, Scalar(a)), cert::affine_form(w1, Scalar(a)));
    } else {
      PointR w0(m, 0.0), w1(m, 0.0);
      w0[0] = rng.log_uniform(-1.0, 1.0);
      w1[1] = rng.log_uniform(-1.0, 1.0);
      Z = cert::product(cert::affine_form(w0, Scalar(rng.uniform(-2.0, 2.0))),
                        cert::affine_form(w1, Scalar(rng.uniform(-2.0, 2.0))));
      if (family == 2 && m >= 3) {
        PointR w2(m, 0.0);
        w2[2] = rng.log_uniform(-1.0, 1.0);
        Z = cert::product(Z, cert::affine_form(w2, Scalar(rng.uniform(-2.0, 2.0))));
      }
    }
    MultiAffinePoly input = Z.multiaffine();
    MultiAffinePoly image = asymmetric_step(input, 0, 1, beta12, t);
    StabilityVerdict v = probe_stable(image, probes_per_trial, rng.raw());
    if (v.falsified_p()) {
      out.found = true;
      out.input = input;
      out.image = image;
      out.falsifier = v;
      return out;
    }
  }
  out.trials = budget;
  return out;
}

inline AsymmetryWitness asymmetry_counterexample(double beta12, double t, int budget,
                                                 std::uint64_t seed = 0x5EED) {
  require(std::abs(beta12 - 0.5) > 1e-12,
          "asymmetry_counterexample: symmetric case preserves stability");
  return asymmetry_search(beta12, t, budget, seed);
}

}  // namespace stablekit
