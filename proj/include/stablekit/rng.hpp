#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "stablekit/scalar.hpp"

namespace stablekit {

// Deterministic RNG used for every probe schedule and test generator.
// All transforms are hand-rolled on top of mt19937_64 so that a given
// seed reproduces the same stream on any platform / standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Standard Cauchy via inverse CDF.
  double cauchy() {
    double u = uniform();
    return std::tan(M_PI * (u - 0.5));
  }

  // exp(Uniform[lo, hi]) — positive, spans several decades.
  double log_uniform(double lo = -3.0, double hi = 3.0) {
    return std::exp(uniform(lo, hi));
  }

  // Box-Muller.
  double normal() {
    double u1 = uniform(), u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Scalar normal_complex() { return Scalar(normal(), normal()); }

  // Uniform on the unit circle.
  Scalar unit_complex() {
    double t = 2.0 * M_PI * uniform();
    return Scalar(std::cos(t), std::sin(t));
  }

  // Child generator with a decorrelated seed; used to hand out one
  // independent stream per probe batch from a master seed.
  Rng spawn() { return Rng(gen_() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace stablekit
