#include <catch2/catch_amalgamated.hpp>

#include "stablekit/polarize.hpp"
#include "stablekit/stability.hpp"

#include "helpers.hpp"

using namespace stablekit;
using namespace stablekit::testing;

TEST_CASE("polarize_uni known values") {
  // x^2 - 1, m = 2 -> x1x2 - 1
  MultiAffinePoly p = polarize_uni(upoly_real({-1, 0, 1}), 2);
  CHECK(approx_equal(p, ma(2, {{0b11, 1.0}, {0b00, -1.0}})));

  // x, m = 2 -> (x1 + x2)/2
  MultiAffinePoly q = polarize_uni(upoly_real({0, 1}), 2);
  CHECK(approx_equal(q, ma(2, {{0b01, 0.5}, {0b10, 0.5}})));

  // x^5 + 10x^2 + 1, m = 5: every |S| = 2 coefficient is 10 / C(5,2) = 1
  MultiAffinePoly r = polarize_uni(upoly_real({1, 0, 10, 0, 0, 1}), 5);
  CHECK(nearly_equal(r.coeff(0b00011), Scalar(1.0)));
  CHECK(nearly_equal(r.coeff(0b10100), Scalar(1.0)));
  CHECK(nearly_equal(r.coeff(0b11111), Scalar(1.0)));
  CHECK(nearly_equal(r.coeff(0b00000), Scalar(1.0)));
  CHECK(nearly_equal(r.coeff(0b00001), Scalar(0.0)));

  CHECK_THROWS_AS(polarize_uni(upoly_real({0, 0, 0, 1}), 2), std::invalid_argument);
}

TEST_CASE("polarize_uni diagonal recovery") {
  Rng rng(3);
  for (int rep = 0; rep < 40; ++rep) {
    int m = rng.uniform_int(1, 6);
    int d = rng.uniform_int(0, m);
    std::vector<Scalar> c(d + 1);
    for (Scalar& v : c) v = Scalar(rng.uniform(-2, 2), rng.uniform(-2, 2));
    DensePoly f = upoly(c);
    MultiAffinePoly P = polarize_uni(f, m);
    DensePoly diag = P.diagonal_restriction();
    CHECK(approx_equal(diag.trimmed(1e-12), f.trimmed(1e-12), 1e-12));
    // symmetry: swapping any pair fixes P
    if (m >= 2) CHECK(approx_equal(P.swap_vars(0, m - 1), P, 1e-12));
  }
}

TEST_CASE("polarize_multi known values") {
  // x1 x2 with kappa = (1,1) is the identity lift
  DensePoly f(2, {1, 1});
  f.set({1, 1}, Scalar(1));
  MultiAffinePoly P = polarize_multi(f, {1, 1});
  CHECK(approx_equal(P, ma(2, {{0b11, 1.0}})));

  // x1^2 with kappa = (2) -> u11 u12
  DensePoly g(1, {2});
  g.set({2}, Scalar(1));
  MultiAffinePoly Q = polarize_multi(g, {2});
  CHECK(approx_equal(Q, ma(2, {{0b11, 1.0}})));

  // x1^2 x2 with kappa = (2,1) -> u11 u12 u21
  DensePoly h(2, {2, 1});
  h.set({2, 1}, Scalar(1));
  MultiAffinePoly R = polarize_multi(h, {2, 1});
  CHECK(approx_equal(R, ma(3, {{0b111, 1.0}})));

  CHECK_THROWS_AS(polarize_multi(h, {1, 1}), std::invalid_argument);
}

TEST_CASE("polarize_multi round trip is exact") {
  Rng rng(8);
  for (int rep = 0; rep < 40; ++rep) {
    int m = rng.uniform_int(1, 3);
    std::vector<int> kappa(m);
    int total = 0;
    for (int& k : kappa) {
      k = rng.uniform_int(1, 3);
      total += k;
    }
    if (total > 12) continue;
    DensePoly f = random_dense(rng, m, kappa, false);
    MultiAffinePoly P = polarize_multi(f, kappa);
    DensePoly back = polarization_diagonal(P, kappa);
    CHECK(approx_equal(back, f, 1e-12));
  }
}

TEST_CASE("partial_symmetrize known values") {
  MultiAffinePoly x1 = ma(2, {{0b01, 1.0}});
  CHECK(approx_equal(partial_symmetrize(x1, 0, 1, 0.5), ma(2, {{0b01, 0.5}, {0b10, 0.5}})));

  MultiAffinePoly sym = ma(2, {{0b01, 1.0}, {0b10, 1.0}, {0b11, 3.0}});
  CHECK(approx_equal(partial_symmetrize(sym, 0, 1, 0.37), sym));

  MultiAffinePoly f = ma(2, {{0b11, 1.0}, {0b01, -2.0}, {0b10, -1.0}, {0b00, 2.0}});
  MultiAffinePoly expect = ma(2, {{0b11, 1.0}, {0b01, -1.5}, {0b10, -1.5}, {0b00, 2.0}});
  CHECK(approx_equal(partial_symmetrize(f, 0, 1, 0.5), expect));
}

TEST_CASE("imbalance known values") {
  MultiAffinePoly f = ma(2, {{0b11, 1.0}, {0b01, -2.0}, {0b10, -1.0}, {0b00, 2.0}});
  ImbalanceReport rep = imbalance(f);
  CHECK(rep.pairwise[{0, 1}] == Catch::Approx(2.0));
  CHECK(rep.total == Catch::Approx(2.0));

  MultiAffinePoly sym = polarize_uni(upoly_real({1, 2, 3}), 4);
  ImbalanceReport rs = imbalance(sym);
  CHECK(rs.total == Catch::Approx(0.0).margin(1e-12));

  MultiAffinePoly x1 = ma(2, {{0b01, 1.0}});
  CHECK(imbalance(x1).pairwise[{0, 1}] == Catch::Approx(2.0));
}

TEST_CASE("gws_iterate on (x-1)(x-2), m = 2") {
  DensePoly f = poly_from_real_roots({1.0, 2.0});
  GwsResult r = gws_iterate(f, 2);
  CHECK(r.iterations == 1);
  MultiAffinePoly expect = ma(2, {{0b11, 1.0}, {0b01, -1.5}, {0b10, -1.5}, {0b00, 2.0}});
  CHECK(approx_equal(r.result, expect, 1e-9));
  CHECK(approx_equal(r.result, polarize_uni(f, 2), 1e-9));
  REQUIRE(r.trace.size() == 2);
  CHECK(r.trace[1] <= 1e-10 * r.trace[0]);
}

TEST_CASE("gws_iterate trivial cases") {
  DensePoly f = upoly_real({0, 1});
  GwsResult r = gws_iterate(f, 1);
  CHECK(r.iterations == 0);
  CHECK(approx_equal(r.result, ma(1, {{0b1, 1.0}})));
  CHECK_THROWS_AS(gws_iterate(upoly_real({0.0}), 2), std::invalid_argument);
}

TEST_CASE("gws_iterate contracts at the guaranteed rate and hits Pol_m") {
  Rng rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    int m = rng.uniform_int(2, 5);
    int d = rng.uniform_int(1, m);
    std::vector<double> rts(d);
    for (double& v : rts) v = rng.uniform(-3, 3);
    DensePoly f = poly_from_real_roots(rts);
    GwsResult r = gws_iterate(f, m, 1e-12);
    double rate = 1.0 - 1.0 / static_cast<double>(binomial(m, 2));
    for (std::size_t k = 0; k + 1 < r.trace.size(); ++k)
      CHECK(r.trace[k + 1] <= rate * r.trace[k] + 1e-12);
    CHECK(approx_equal(r.result, polarize_uni(f, m), 1e-9));
    // every iterate keeps the diagonal: check the limit
    CHECK(approx_equal(r.result.diagonal_restriction().trimmed(),
                       f.trimmed(), 1e-9));
  }
}

TEST_CASE("quintic trace decays at ratio <= 0.9") {
  DensePoly f = upoly_real({1, 0, 10, 0, 0, 1});
  GwsResult r = gws_iterate(f, 5, 1e-10);
  double rate = 1.0 - 1.0 / 10.0;
  REQUIRE(r.trace.size() >= 3);
  for (std::size_t k = 0; k + 1 < r.trace.size(); ++k)
    CHECK(r.trace[k + 1] <= rate * r.trace[k] + 1e-12);
  CHECK(approx_equal(r.result, polarize_uni(f, 5), 1e-8));
}

TEST_CASE("stability transport through the iteration") {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    int d = rng.uniform_int(1, 6);
    int m = d + rng.uniform_int(0, 2);
    if (m > 8) m = 8;
    std::vector<double> rts(d);
    for (double& v : rts) v = rng.uniform(-3, 3);
    DensePoly f = poly_from_real_roots(rts);
    GwsResult r = gws_iterate(f, m);
    CHECK(probe_stable(r.result, 60, rng.raw()).positive());
  }
  // a conjugate pair of strictly complex roots must falsify
  for (int rep = 0; rep < 20; ++rep) {
    int m = rng.uniform_int(2, 4);
    double re = rng.uniform(-1, 1), im = rng.uniform(0.3, 2.0);
    // (x - re)^2 + im^2, strictly complex pair
    DensePoly f = upoly_real({re * re + im * im, -2 * re, 1});
    GwsResult r = gws_iterate(f, m);
    CHECK(probe_stable(r.result, 200, rng.raw()).falsified_p());
  }
}

TEST_CASE("symmetric_homogenize known values") {
  MultiAffinePoly one = MultiAffinePoly::constant(1, Scalar(1));
  MultiAffinePoly sh1 = symmetric_homogenize(one);  // vars (x1, y1)
  CHECK(approx_equal(sh1, ma(2, {{0b10, 1.0}})));   // y1

  MultiAffinePoly x1 = MultiAffinePoly::variable(1, 0);
  CHECK(approx_equal(symmetric_homogenize(x1), ma(2, {{0b01, 1.0}})));

  MultiAffinePoly f = ma(2, {{0b00, 1.0}, {0b11, 1.0}});  // 1 + x1x2
  MultiAffinePoly sh = symmetric_homogenize(f);           // vars (x1,x2,y1,y2)
  CHECK(approx_equal(sh, ma(4, {{0b1100, 1.0}, {0b0011, 1.0}})));
}

TEST_CASE("symmetric_homogenize restores f at y = 1 and is homogeneous") {
  Rng rng(77);
  for (int rep = 0; rep < 30; ++rep) {
    int m = rng.uniform_int(1, 5);
    MultiAffinePoly f = random_multiaffine(rng, m, true);
    MultiAffinePoly sh = symmetric_homogenize(f);
    // homogeneous of degree m
    int deg = -1;
    CHECK(sh.to_dense().is_homogeneous(&deg));
    CHECK(deg == m);
    // f_sh(x, 1) = f
    PointC z(2 * m);
    PointR x = random_point(rng, m);
    for (int v = 0; v < m; ++v) z[v] = Scalar(x[v], 0);
    for (int v = m; v < 2 * m; ++v) z[v] = Scalar(1.0, 0);
    CHECK(std::abs(sh.evaluate(z) - f.evaluate(x)) <= 1e-10 * (1 + std::abs(f.evaluate(x))));
  }
}

TEST_CASE("certified polarization wrappers") {
  CertifiedPoly f = cert::affine_form({1.0}, Scalar(-2.0));  // x - 2
  CertifiedPoly p = cert::polarize_uni(f, 3);
  CHECK(p.derivation.back() == "polarize");
  CHECK(probe_stable(p.poly, 50, 5).positive());

  CertifiedPoly ps = cert::partial_symmetrize(p, 0, 1, 0.25);
  CHECK(probe_stable(ps.poly, 50, 5).positive());
  CHECK_THROWS_AS(cert::partial_symmetrize(p, 0, 1, 1.5), std::invalid_argument);
}
