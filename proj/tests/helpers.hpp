#pragma once

#include <cstdint>
#include <vector>

#include "stablekit/dense.hpp"
#include "stablekit/multiaffine.hpp"
#include "stablekit/rng.hpp"

namespace stablekit::testing {

inline MultiAffinePoly ma(int m, std::vector<std::pair<std::uint32_t, Scalar>> terms) {
  MultiAffinePoly f(m);
  for (auto& [mask, c] : terms) f.set(mask, c);
  return f;
}

inline DensePoly upoly(std::vector<Scalar> coeffs) { return DensePoly::univariate(coeffs); }

inline DensePoly upoly_real(std::vector<double> coeffs) {
  std::vector<Scalar> c(coeffs.begin(), coeffs.end());
  return DensePoly::univariate(c);
}

inline MultiAffinePoly random_multiaffine(Rng& rng, int m, bool real = true) {
  MultiAffinePoly f(m);
  for (std::uint32_t s = 0; s < (std::uint32_t(1) << m); ++s)
    f.set(s, real ? Scalar(rng.uniform(-2.0, 2.0), 0.0)
                  : Scalar(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
  return f;
}

inline DensePoly random_dense(Rng& rng, int m, const std::vector<int>& kappa, bool real = true) {
  DensePoly f(m, kappa);
  for (Scalar& c : f.coeffs_mut())
    c = real ? Scalar(rng.uniform(-2.0, 2.0), 0.0)
             : Scalar(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
  return f;
}

// Monic real-rooted polynomial with the given roots.
inline DensePoly poly_from_real_roots(const std::vector<double>& roots) {
  DensePoly p = DensePoly::constant(1, Scalar(1));
  for (double r : roots) p = p * upoly_real({-r, 1.0});
  return p;
}

inline PointR random_point(Rng& rng, int m, double lo = -3.0, double hi = 3.0) {
  PointR a(m);
  for (double& v : a) v = rng.uniform(lo, hi);
  return a;
}

}  // namespace stablekit::testing
