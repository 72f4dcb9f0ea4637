#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace stablekit {

using Scalar = std::complex<double>;

// Absolute tolerance for "is this coefficient zero / real" decisions.
// All desk-scale checks in this library run at mild conditioning, so a
// single absolute epsilon is used throughout.
inline constexpr double kEpsZero = 1e-10;

// Root-level tolerances (relative to the root scale of the instance).
inline constexpr double kRootImagTol = 1e-7;
inline constexpr double kRootCollisionTol = 1e-6;

// Capacity limits for the two coefficient tables.
inline constexpr int kMaxMultiAffineArity = 24;
inline constexpr long kMaxDenseBox = 1L << 22;

using PointR = std::vector<double>;
using PointC = std::vector<Scalar>;

inline bool is_finite(const Scalar& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline bool nearly_zero(const Scalar& z, double tol = kEpsZero) {
  return std::abs(z) <= tol;
}

inline bool nearly_equal(const Scalar& a, const Scalar& b, double tol = kEpsZero) {
  return std::abs(a - b) <= tol;
}

inline PointC to_complex(const PointR& a) {
  PointC z(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) z[i] = Scalar(a[i], 0.0);
  return z;
}

inline void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void require_cap(bool cond, const char* what) {
  if (!cond) throw std::domain_error(what);
}

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace stablekit
