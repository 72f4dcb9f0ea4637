#include <catch2/catch_amalgamated.hpp>

#include "stablekit/capacity.hpp"
#include "stablekit/detpoly.hpp"
#include "stablekit/stability.hpp"

#include "helpers.hpp"

using namespace stablekit;
using namespace stablekit::testing;

namespace {

MatrixPencil random_psd_pencil(Rng& rng, int m, int n) {
  std::vector<HermitianMatrix> A;
  for (int i = 0; i < m; ++i) A.push_back(random_psd(rng, n, 0.7));
  return MatrixPencil(std::move(A), random_hermitian(rng, n));
}

}  // namespace

TEST_CASE("HermitianMatrix validation") {
  CMatrix M(2, 2);
  M << Scalar(1, 0), Scalar(0, 1), Scalar(0, -1), Scalar(2, 0);
  HermitianMatrix H(M);
  CHECK(H.is_psd());  // eigenvalues (3±sqrt(5))/2 > 0
  CHECK(H.is_pd());

  CMatrix bad(2, 2);
  bad << Scalar(1, 0), Scalar(1, 0), Scalar(0, 0), Scalar(1, 0);
  CHECK_THROWS_AS(HermitianMatrix(bad), std::invalid_argument);
}

TEST_CASE("pencil_poly known values") {
  CMatrix A1 = CMatrix::Zero(2, 2), A2 = CMatrix::Zero(2, 2), B(2, 2);
  A1(0, 0) = 1;
  A2(1, 1) = 1;
  B << 0, 1, 1, 0;
  DensePoly f = pencil_poly(MatrixPencil({HermitianMatrix(A1), HermitianMatrix(A2)},
                                         HermitianMatrix(B)));
  CHECK(approx_equal(f, ma(2, {{0b11, 1.0}, {0b00, -1.0}}).to_dense(), 1e-9));

  // A1 = I_2, m = 1, B = 0 -> x^2
  DensePoly g = pencil_poly(MatrixPencil({HermitianMatrix(CMatrix::Identity(2, 2))},
                                         HermitianMatrix(CMatrix::Zero(2, 2))));
  CHECK(g.arity() == 1);
  CHECK(nearly_equal(g.coeff({2}), Scalar(1.0), 1e-9));
  CHECK(nearly_equal(g.coeff({1}), Scalar(0.0), 1e-9));

  // diagonal projector pencil: det(diag(x1, x2)) = x1 x2
  DensePoly h = pencil_poly(MatrixPencil({HermitianMatrix(A1), HermitianMatrix(A2)},
                                         HermitianMatrix(CMatrix::Zero(2, 2))));
  CHECK(approx_equal(h, ma(2, {{0b11, 1.0}}).to_dense(), 1e-9));
}

TEST_CASE("pencil_poly matches direct determinant evaluation") {
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    int m = rng.uniform_int(1, 3), n = rng.uniform_int(1, 4);
    MatrixPencil P = random_psd_pencil(rng, m, n);
    DensePoly f = pencil_poly(P);
    for (int k = 0; k < 5; ++k) {
      PointR x = random_point(rng, m, -2.0, 2.0);
      CMatrix M = P.B.a;
      for (int i = 0; i < m; ++i) M += x[i] * P.A[i].a;
      Scalar want = Eigen::PartialPivLU<CMatrix>(M).determinant();
      Scalar got = f.evaluate(x);
      CHECK(std::abs(got - want) <= 1e-8 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("pencil polynomials probe-pass and register as certified") {
  Rng rng(22);
  for (int rep = 0; rep < 100; ++rep) {
    int m = rng.uniform_int(1, 3), n = rng.uniform_int(1, 3);
    MatrixPencil P = random_psd_pencil(rng, m, n);
    CertifiedPoly f = certified_pencil(P);
    CHECK(f.derivation == std::vector<std::string>{"pencil"});
    CHECK(probe_stable(f.poly, 60, rng.raw()).positive());
  }
}

TEST_CASE("mixed_det known values") {
  CMatrix I2 = CMatrix::Identity(2, 2);
  CHECK(mixed_det({I2, I2}) == Catch::Approx(4.0));

  // Det(xI, -B) lifted to a polynomial equals det(xI - B)
  CMatrix B(2, 2);
  B << 0, 1, 1, 0;
  DensePoly p = charlike_poly(I2, B);
  CHECK(approx_equal(p, upoly_real({-1, 0, 1}), 1e-9));

  // single-matrix mixed determinant is the determinant
  Rng rng(23);
  HermitianMatrix H = random_hermitian(rng, 3);
  CHECK(mixed_det({H.a}) ==
        Catch::Approx(Eigen::PartialPivLU<CMatrix>(H.a).determinant().real()).margin(1e-9));
}

TEST_CASE("mixed discriminant multilinearity in each slot") {
  // each slot of the discriminant enters linearly (the set-partition
  // mixed determinant does not have this property: its summands carry
  // principal minors of every order)
  Rng rng(24);
  for (int rep = 0; rep < 20; ++rep) {
    int n = rng.uniform_int(2, 4);
    std::vector<CMatrix> tail;
    for (int i = 1; i < n; ++i) tail.push_back(random_hermitian(rng, n).a);
    CMatrix A = random_hermitian(rng, n).a, B = random_hermitian(rng, n).a;
    double s = rng.uniform(-2, 2), t = rng.uniform(-2, 2);
    auto with_head = [&](const CMatrix& H) {
      std::vector<CMatrix> all = {H};
      all.insert(all.end(), tail.begin(), tail.end());
      return mixed_discriminant(all);
    };
    double lhs = with_head((s * A + t * B).eval());
    double rhs = s * with_head(A) + t * with_head(B);
    CHECK(lhs == Catch::Approx(rhs).margin(1e-9 * (1 + std::abs(rhs))));
  }
}

TEST_CASE("mixed_det degree structure under scaling") {
  // Det(cA, B) = sum_j c^j sigma-like terms; freeze the quadratic case
  CMatrix I2 = CMatrix::Identity(2, 2);
  CHECK(mixed_det({(2.0 * I2).eval(), I2}) == Catch::Approx(9.0));
}

TEST_CASE("mixed determinant pencils stay real stable with the dropped-site variable") {
  Rng rng(25);
  for (int rep = 0; rep < 10; ++rep) {
    int m = rng.uniform_int(1, 3), n = rng.uniform_int(2, 4), l = rng.uniform_int(1, 2);
    std::vector<MatrixPencil> Ls;
    for (int h = 0; h < l; ++h) Ls.push_back(random_psd_pencil(rng, m, n));
    int j = rng.uniform_int(0, n - 1);
    DensePoly det_full = mixed_det_pencil_poly(Ls);
    std::vector<MatrixPencil> dropped;
    for (const auto& L : Ls) dropped.push_back(drop_site(L, j));
    DensePoly det_drop = mixed_det_pencil_poly(dropped);
    // embed into m+1 variables: Det(L) + y Det(L(j))
    std::vector<int> bounds = det_full.bounds();
    bounds.push_back(1);
    DensePoly combo(m + 1, bounds);
    std::vector<int> idx(m + 1, 0);
    for (const auto& pt : det_full.support(0.0)) {
      for (int v = 0; v < m; ++v) idx[v] = pt[v];
      idx[m] = 0;
      combo.set(idx, det_full.coeff(pt));
    }
    for (const auto& pt : det_drop.support(0.0)) {
      for (int v = 0; v < m; ++v) idx[v] = pt[v];
      idx[m] = 1;
      combo.set(idx, det_drop.coeff(pt));
    }
    CHECK(combo.is_real(1e-9));
    CHECK(probe_stable(combo, 60, rng.raw()).positive());
  }
}

TEST_CASE("johnson_suite known values") {
  CMatrix I2 = CMatrix::Identity(2, 2);
  CMatrix B = CMatrix::Zero(2, 2);
  B(0, 0) = 1;
  B(1, 1) = -1;
  JohnsonReport rep = johnson_suite(HermitianMatrix(I2), HermitianMatrix(B));
  CHECK(approx_equal(rep.p, upoly_real({-1, 0, 1}), 1e-9));  // (x-1)(x+1)
  CHECK(rep.real_rooted);
  CHECK(rep.poly_inertia == Inertia{1, 0, 1});
  CHECK(rep.inertia_match);

  JohnsonReport zero = johnson_suite(HermitianMatrix(CMatrix::Identity(3, 3)),
                                     HermitianMatrix(CMatrix::Zero(3, 3)));
  CHECK(zero.real_rooted);
  CHECK(zero.poly_inertia == Inertia{0, 3, 0});
  CHECK(zero.inertia_match);

  CHECK_THROWS_AS(johnson_suite(HermitianMatrix(CMatrix::Zero(2, 2)),
                                HermitianMatrix(B)),
                  std::invalid_argument);
}

TEST_CASE("johnson_suite holds on random instances") {
  Rng rng(26);
  int clean = 0, degenerate = 0;
  for (int rep = 0; rep < 60; ++rep) {
    int n = rng.uniform_int(2, 4);
    JohnsonReport r = johnson_suite(random_pd(rng, n), random_hermitian(rng, n));
    if (r.any_degenerate()) {
      ++degenerate;
      continue;
    }
    ++clean;
    CHECK(r.all_hold());
  }
  CHECK(clean >= 55);  // degenerate draws are rare
}

TEST_CASE("fisher_products known values") {
  FisherProducts fi = fisher_products(HermitianMatrix(CMatrix::Identity(2, 2)));
  REQUIRE(fi.sigma.size() == 3);
  CHECK(fi.sigma[0] == Catch::Approx(1.0));
  CHECK(fi.sigma[1] == Catch::Approx(2.0));
  CHECK(fi.sigma[2] == Catch::Approx(1.0));
  CHECK(fi.averaged[1] == Catch::Approx(1.0));

  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 1;
  FisherProducts fd = fisher_products(HermitianMatrix(D));
  CHECK(fd.sigma[0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(fd.sigma[1] == Catch::Approx(0.0).margin(1e-12));
  CHECK(fd.sigma[2] == Catch::Approx(0.0).margin(1e-12));

  CMatrix one(1, 1);
  one(0, 0) = 3.5;
  FisherProducts f1 = fisher_products(HermitianMatrix(one));
  CHECK(f1.sigma[0] == Catch::Approx(3.5));
  CHECK(f1.sigma[1] == Catch::Approx(3.5));
}

TEST_CASE("fisher products match brute-force subset enumeration") {
  Rng rng(27);
  for (int rep = 0; rep < 10; ++rep) {
    int n = rng.uniform_int(1, 5);
    HermitianMatrix A = random_psd(rng, n);
    FisherProducts fp = fisher_products(A);
    // independent oracle: iterate subsets as index vectors
    std::vector<double> want(n + 1, 0.0);
    for (std::uint32_t S = 0; S < (std::uint32_t(1) << n); ++S) {
      std::vector<int> in, out;
      for (int i = 0; i < n; ++i)
        ((S >> i) & 1 ? in : out).push_back(i);
      auto det_of = [&](const std::vector<int>& rows) {
        if (rows.empty()) return Scalar(1);
        CMatrix sub(rows.size(), rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
          for (std::size_t c = 0; c < rows.size(); ++c) sub(r, c) = A.a(rows[r], rows[c]);
        return Eigen::PartialPivLU<CMatrix>(sub).determinant();
      };
      want[in.size()] += (det_of(in) * det_of(out)).real();
    }
    for (int j = 0; j <= n; ++j)
      CHECK(fp.sigma[j] == Catch::Approx(want[j]).margin(1e-9));
  }
}

TEST_CASE("newton_maclaurin_check") {
  NewtonMaclaurinReport ri = newton_maclaurin_check(HermitianMatrix(CMatrix::Identity(3, 3)));
  CHECK(ri.newton);
  CHECK(ri.monotone);
  CHECK(ri.maclaurin);
  // identity gives equalities throughout
  CHECK(ri.newton_margin == Catch::Approx(0.0).margin(1e-12));
  for (double v : ri.averaged) CHECK(v == Catch::Approx(1.0));

  CMatrix D = CMatrix::Zero(3, 3);
  D(0, 0) = 1;
  D(1, 1) = 2;
  D(2, 2) = 3;
  NewtonMaclaurinReport rd = newton_maclaurin_check(HermitianMatrix(D));
  CHECK(rd.newton);
  CHECK(rd.monotone);
  CHECK(rd.maclaurin);

  Rng rng(28);
  for (int rep = 0; rep < 20; ++rep) {
    NewtonMaclaurinReport rr = newton_maclaurin_check(random_psd(rng, 4));
    CHECK(rr.newton);
    CHECK(rr.monotone);
    CHECK(rr.maclaurin);
  }
}

TEST_CASE("diagonal-lift discriminant equals the permanent") {
  Rng rng(29);
  for (int rep = 0; rep < 20; ++rep) {
    int m = rng.uniform_int(2, 5);
    std::vector<std::vector<double>> B(m, std::vector<double>(m));
    for (auto& row : B)
      for (double& v : row) v = (rep % 2 == 0) ? double(rng.uniform_int(0, 1))
                                               : rng.uniform(0.0, 1.0);
    std::vector<CMatrix> lift;
    for (int i = 0; i < m; ++i) {
      CMatrix D = CMatrix::Zero(m, m);
      for (int j = 0; j < m; ++j) D(j, j) = B[i][j];
      lift.push_back(D);
    }
    CHECK(mixed_discriminant(lift) ==
          Catch::Approx(permanent(B)).margin(1e-9 * (1 + permanent(B))));
  }
}
