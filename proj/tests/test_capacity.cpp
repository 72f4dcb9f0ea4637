#include <catch2/catch_amalgamated.hpp>

#include "stablekit/capacity.hpp"
#include "stablekit/ops.hpp"

#include "helpers.hpp"

using namespace stablekit;
using namespace stablekit::testing;

namespace {

double naive_permanent(const std::vector<std::vector<double>>& B) {
  int n = static_cast<int>(B.size());
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  double total = 0.0;
  do {
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= B[i][perm[i]];
    total += p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

std::vector<std::vector<double>> flat_matrix(int m) {
  return std::vector<std::vector<double>>(m, std::vector<double>(m, 1.0 / m));
}

std::vector<std::vector<double>> random_positive_matrix(Rng& rng, int m) {
  std::vector<std::vector<double>> B(m, std::vector<double>(m));
  for (auto& row : B)
    for (double& v : row) v = rng.uniform(0.05, 1.0);
  return B;
}

// column-product polynomial, expanded
DensePoly product_poly(const std::vector<std::vector<double>>& B) {
  int m = static_cast<int>(B.size());
  DensePoly f = DensePoly::constant(m, Scalar(1));
  for (int j = 0; j < m; ++j) {
    DensePoly col = DensePoly::constant(m, Scalar(0));
    for (int i = 0; i < m; ++i)
      col = col + Scalar(B[i][j]) * DensePoly::variable(m, i);
    f = f * col;
  }
  return f;
}

}  // namespace

TEST_CASE("g_factor") {
  CHECK(g_factor(0) == 1.0);
  CHECK(g_factor(1) == 1.0);
  CHECK(g_factor(2) == Catch::Approx(0.5));
  CHECK(g_factor(3) == Catch::Approx(4.0 / 9.0));
  for (int d = 2; d < 40; ++d) CHECK(g_factor(d) < g_factor(d - 1));
  CHECK(g_factor(4000) == Catch::Approx(std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("cap on the standard examples") {
  // ((x1 + x2)/2)^2
  DensePoly f(2, {2, 2});
  f.set({2, 0}, Scalar(0.25));
  f.set({1, 1}, Scalar(0.5));
  f.set({0, 2}, Scalar(0.25));
  CapacityReport r = cap(f);
  CHECK_FALSE(r.diverged);
  CHECK(r.gradient_norm <= 1e-8);
  CHECK(r.cap_estimate == Catch::Approx(1.0).margin(1e-8));

  DensePoly g(2, {1, 1});
  g.set({1, 1}, Scalar(1));
  CapacityReport rg = cap(g);
  CHECK(rg.cap_estimate == Catch::Approx(1.0).margin(1e-10));

  // x1^2 viewed in two variables: the ratio x1/x2 is unbounded below
  DensePoly h(2, {2, 0});
  h.set({2, 0}, Scalar(1));
  CapacityReport rh = cap(h);
  CHECK(rh.diverged);
  CHECK(rh.cap_estimate < 1e-6);

  CHECK_THROWS_AS(cap(DensePoly::constant(2, Scalar(0))), std::invalid_argument);
  DensePoly neg(1, {1});
  neg.set({1}, Scalar(-1.0));
  CHECK_THROWS_AS(cap(neg), std::invalid_argument);
}

TEST_CASE("cap report invariant: minimizer reproduces the estimate") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    int m = rng.uniform_int(2, 4);
    auto B = sinkhorn(random_positive_matrix(rng, m)).matrix;
    DensePoly f = product_poly(B);
    CapacityReport r = cap(f);
    REQUIRE_FALSE(r.diverged);
    CHECK(r.gradient_norm <= 1e-8);
    double prod = 1.0;
    for (double c : r.minimizer) prod *= c;
    double direct = f.evaluate(r.minimizer).real() / prod;
    CHECK(std::abs(direct - r.cap_estimate) <= 1e-10 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("bound_chain known values") {
  DensePoly f(2, {2, 2});
  f.set({2, 0}, Scalar(0.25));
  f.set({1, 1}, Scalar(0.5));
  f.set({0, 2}, Scalar(0.25));
  BoundChain bc = bound_chain(f);
  CHECK(bc.coeff == Catch::Approx(0.5));
  CHECK(bc.weak_bound == Catch::Approx(0.5).margin(1e-7));
  CHECK(bc.bound == Catch::Approx(0.5).margin(1e-7));  // e_2 = 2, G(2) = 1/2
  CHECK(bc.slack >= -1e-9);

  DensePoly g(2, {1, 1});
  g.set({1, 1}, Scalar(1));
  BoundChain bg = bound_chain(g);
  CHECK(bg.coeff == Catch::Approx(1.0));
  CHECK(bg.bound == Catch::Approx(1.0).margin(1e-8));  // G(min(2, 1)) = 1

  DensePoly fj = product_poly(flat_matrix(3));
  BoundChain bj = bound_chain(fj);
  CHECK(bj.coeff == Catch::Approx(2.0 / 9.0).margin(1e-12));
  CHECK(bj.bound == Catch::Approx(2.0 / 9.0).margin(1e-7));
  CHECK(bj.weak_bound == Catch::Approx(2.0 / 9.0).margin(1e-7));

  DensePoly bad = upoly_real({1, 1});
  CHECK_THROWS_AS(bound_chain(bad), std::invalid_argument);
}

TEST_CASE("equality_case") {
  DensePoly f(2, {2, 2});
  f.set({2, 0}, Scalar(0.25));
  f.set({1, 1}, Scalar(0.5));
  f.set({0, 2}, Scalar(0.25));
  EqualityCase ec = equality_case(f);
  CHECK(ec.is_power_of_linear);
  CHECK(ec.a[0] == Catch::Approx(0.5));
  CHECK(ec.a[1] == Catch::Approx(0.5));

  DensePoly g(2, {1, 1});
  g.set({1, 1}, Scalar(1));
  CHECK_FALSE(equality_case(g).is_power_of_linear);

  EqualityCase ej = equality_case(product_poly(flat_matrix(3)));
  CHECK(ej.is_power_of_linear);
  CHECK(ej.a[0] == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("permanent known values") {
  CHECK(permanent({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == Catch::Approx(1.0));
  CHECK(permanent(flat_matrix(3)) == Catch::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(permanent({{1, 1}, {1, 1}}) == Catch::Approx(2.0));
}

TEST_CASE("Ryser agrees with the permutation-sum oracle") {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    int n = rng.uniform_int(1, 7);
    std::vector<std::vector<double>> B(n, std::vector<double>(n));
    for (auto& row : B)
      for (double& v : row) v = rng.uniform(-1.0, 1.0);
    double want = naive_permanent(B);
    double got = permanent(B);
    CHECK(std::abs(got - want) <= 1e-10 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("sinkhorn") {
  Rng rng(9);
  SinkhornResult sr = sinkhorn(random_positive_matrix(rng, 5));
  CHECK(sr.deviation <= 1e-10);
  for (int i = 0; i < 5; ++i) {
    double rs = 0;
    for (int j = 0; j < 5; ++j) rs += sr.matrix[i][j];
    CHECK(rs == Catch::Approx(1.0).margin(1e-9));
  }
  std::vector<std::vector<double>> zero_row = {{0.0, 0.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(sinkhorn(zero_row), std::invalid_argument);
}

TEST_CASE("vdw_suite") {
  VdwReport flat = vdw_suite(flat_matrix(3));
  CHECK(flat.per == Catch::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(flat.bound == Catch::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(flat.cap_is_one);
  CHECK(flat.bound_holds);
  CHECK(flat.equality);

  VdwReport id = vdw_suite({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, false);
  CHECK(id.per == Catch::Approx(1.0));
  CHECK(id.bound_holds);
  CHECK_FALSE(id.equality);

  Rng rng(10);
  VdwReport rr = vdw_suite(random_positive_matrix(rng, 5));
  CHECK(rr.cap_is_one);
  CHECK(rr.bound_holds);
  CHECK(rr.slack > 0.0);
}

TEST_CASE("mixed_discriminant") {
  CMatrix I2 = CMatrix::Identity(2, 2);
  CHECK(mixed_discriminant({I2, I2}) == Catch::Approx(2.0));

  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    int n = 3;
    std::vector<std::vector<double>> B(n, std::vector<double>(n));
    for (auto& row : B)
      for (double& v : row) v = rng.uniform(0.0, 1.0);
    std::vector<CMatrix> lift;
    for (int i = 0; i < n; ++i) {
      CMatrix D = CMatrix::Zero(n, n);
      for (int j = 0; j < n; ++j) D(j, j) = B[i][j];
      lift.push_back(D);
    }
    CHECK(mixed_discriminant(lift) == Catch::Approx(naive_permanent(B)).margin(1e-12));
  }

  // coefficient extraction from the pencil polynomial agrees
  for (int rep = 0; rep < 5; ++rep) {
    int n = 3;
    std::vector<HermitianMatrix> A;
    std::vector<CMatrix> raw;
    for (int i = 0; i < n; ++i) {
      HermitianMatrix M = random_psd(rng, n);
      raw.push_back(M.a);
      A.push_back(M);
    }
    DensePoly p = pencil_poly(MatrixPencil(A, HermitianMatrix(CMatrix::Zero(n, n))));
    std::vector<int> ones(n, 1);
    CHECK(p.coeff(ones).real() ==
          Catch::Approx(mixed_discriminant(raw)).epsilon(1e-8));
  }
}

TEST_CASE("bapat_suite") {
  // the diagonal lift of the flat matrix achieves equality
  int m = 3;
  std::vector<HermitianMatrix> A;
  for (int i = 0; i < m; ++i) {
    CMatrix D = CMatrix::Identity(m, m) / double(m);
    A.push_back(HermitianMatrix(D));
  }
  BapatReport rep = bapat_suite(A);
  CHECK(rep.omega_member);
  CHECK(rep.disc == Catch::Approx(2.0 / 9.0).margin(1e-10));
  CHECK(rep.bound_holds);
  CHECK(rep.cap_is_one);
  CHECK(rep.equality.is_power_of_linear);

  // diagonal lift of a random doubly stochastic matrix
  Rng rng(13);
  auto B = sinkhorn(random_positive_matrix(rng, 3)).matrix;
  std::vector<HermitianMatrix> AB;
  for (int i = 0; i < 3; ++i) {
    CMatrix D = CMatrix::Zero(3, 3);
    for (int j = 0; j < 3; ++j) D(j, j) = B[i][j];
    AB.push_back(HermitianMatrix(D));
  }
  BapatReport rb = bapat_suite(AB);
  CHECK(rb.bound_holds);
  CHECK(rb.cap_is_one);
  CHECK(rb.disc == Catch::Approx(naive_permanent(B)).margin(1e-10));

  // a tuple failing the trace condition is rejected
  std::vector<HermitianMatrix> badA = {HermitianMatrix(CMatrix::Identity(2, 2)),
                                       HermitianMatrix(CMatrix::Zero(2, 2))};
  CHECK_THROWS_AS(bapat_suite(badA), std::invalid_argument);
}

TEST_CASE("cap_root_bound") {
  UniCapReport r1 = cap_root_bound(upoly_real({1, 2, 1}));  // (1+x)^2
  CHECK(r1.b1 == Catch::Approx(2.0));
  CHECK(r1.cap_value == Catch::Approx(4.0).margin(1e-6));
  CHECK(r1.bound == Catch::Approx(2.0).margin(1e-6));
  CHECK(r1.holds);
  CHECK(r1.equality);
  CHECK(r1.xi == Catch::Approx(1.0));

  UniCapReport r2 = cap_root_bound(upoly_real({0, 1}));  // x
  CHECK(r2.b1 == Catch::Approx(1.0));
  CHECK(r2.cap_value == Catch::Approx(1.0).margin(1e-6));
  CHECK(r2.holds);
  CHECK(r2.equality);  // d = 1

  UniCapReport r3 = cap_root_bound(upoly_real({2, 3, 1}));  // (1+x)(2+x)
  CHECK(r3.b1 == Catch::Approx(3.0));
  CHECK(r3.cap_value == Catch::Approx(3.0 + 2.0 * std::sqrt(2.0)).margin(1e-6));
  CHECK(r3.holds);
  CHECK(r3.b1 > r3.bound + 0.05);
  CHECK_FALSE(r3.equality);

  CHECK_THROWS_AS(cap_root_bound(upoly_real({1, -1})), std::invalid_argument);
}

TEST_CASE("contraction-specialization step property") {
  // cap(d_m f |_{x_m = 0}) >= G(deg_m f) cap(f) on column-product inputs
  Rng rng(14);
  for (int rep = 0; rep < 15; ++rep) {
    int m = rng.uniform_int(2, 4);
    auto B = sinkhorn(random_positive_matrix(rng, m)).matrix;
    DensePoly f = product_poly(B);
    int d = f.deg(m - 1);
    DensePoly g = f.derivative(m - 1).specialize(m - 1, Scalar(0));
    CapacityReport cf = cap(f), cg = cap(g);
    REQUIRE_FALSE(cf.diverged);
    REQUIRE_FALSE(cg.diverged);
    CHECK(cg.cap_estimate >= g_factor(d) * cf.cap_estimate - 1e-6);
  }
}
