#include "gonlab/core.hpp"
#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gonlab;

TEST_CASE("norms") {
  Vec v = {Scalar(1), Scalar(-3), Scalar(2)};
  REQUIRE(sup_norm(v) == Scalar(3));
  REQUIRE(sup_norm(Vec{Scalar(0), Scalar(0)}) == Scalar(0));
  REQUIRE(sup_norm(Vec{Scalar::rational(1, 2), Scalar::rational(-1, 2)}) ==
          Scalar::rational(1, 2));
  REQUIRE_THROWS_AS(sup_norm(Vec{}), scalar_error);
}

TEST_CASE("torus distance") {
  REQUIRE(torus_distance(Vec{Scalar::rational(3, 4)}) == Scalar::rational(1, 4));
  REQUIRE(torus_distance(Vec{Scalar::rational(1, 3), Scalar::rational(2, 3)}) ==
          Scalar::rational(1, 3));
  REQUIRE(torus_distance(Vec{Scalar(5), Scalar(-2)}) == Scalar(0));
}

TEST_CASE("f_value") {
  Dims d21(2, 1), d11(1, 1);
  Vec half = {Scalar::rational(1, 2), Scalar::rational(1, 2), Scalar::rational(1, 2)};
  REQUIRE(f_value(half, d21) == Scalar::rational(1, 8));
  REQUIRE(f_value(Vec{Scalar(0), Scalar(0), Scalar(0)}, d21) == Scalar(0));
  REQUIRE(f_value(Vec{Scalar(3), Scalar(2)}, d11) == Scalar(6));
  // euclidean flag
  Vec u = {Scalar(3), Scalar(4), Scalar(2)};
  Scalar e = f_value(u, d21, NormKind::euclidean);
  REQUIRE((e - Scalar(20)).abs().to_double() < 1e-60);  // 5^1 * 2^2
}

TEST_CASE("flow: identity at t = 0 and exact scale semantics") {
  Dims d11(1, 1);
  Vec u = {Scalar(1), Scalar(1)};
  REQUIRE(apply_flow(Scalar(0), u, d11) == u);
  // lambda = 2 plays t = ln 2: (1,1) -> (2, 1/2), F preserved
  Vec v = apply_flow_scale(Scalar(2), u, d11);
  REQUIRE(v[0] == Scalar(2));
  REQUIRE(v[1] == Scalar::rational(1, 2));
  REQUIRE(f_value(v, d11) == f_value(u, d11));
  // bigreal t = ln 2 agrees within the interval
  Vec w = apply_flow(Scalar(2).log(), u, d11);
  REQUIRE((w[0] - Scalar(2)).abs().to_double() < 1e-70);
}

TEST_CASE("flow invariance of F on random inputs") {
  // 1000 random (u, t, dims): F(h_t u) = F(u) within the combined radius
  for (int iter = 0; iter < 1000; ++iter) {
    uint64_t h = testing::mix64(iter);
    int m = 1 + (h % 3), n = 1 + ((h >> 8) % 3);
    Dims dims(m, n);
    Vec u(dims.d());
    for (int i = 0; i < dims.d(); ++i) {
      long num = static_cast<long>((testing::mix64(h + i + 1) % 2001)) - 1000;
      u[i] = Scalar(mpq_class(num, 97));
    }
    long tn = static_cast<long>(testing::mix64(h + 77) % 9) - 4;
    Scalar t = Scalar(mpq_class(tn, 4));
    Scalar before = f_value(u, dims);
    Scalar after = f_value(apply_flow(t, u, dims), dims);
    REQUIRE((after - before).abs().to_double() < 1e-55 * (1 + before.abs().to_double()));
  }
}

TEST_CASE("lattice from a matrix") {
  Dims d11(1, 1);
  Mat A(1, 1);
  A(0, 0) = Scalar::sqrt_of_ui(2);
  LatticeBasis b = lattice_from_matrix(A, d11);
  REQUIRE(b.det == Scalar(1));
  REQUIRE(b.unimodular);
  REQUIRE(b.columns(0, 1) == Scalar::sqrt_of_ui(2));
  REQUIRE(b.columns(1, 1) == Scalar(1));
  // zero matrix gives the identity basis
  Mat Z(2, 2);
  LatticeBasis bz = lattice_from_matrix(Z, Dims(2, 2));
  REQUIRE(bz.columns == Mat::identity(4));
  // random rational A keeps det 1
  for (int iter = 0; iter < 20; ++iter) {
    Dims dd(2, 2);
    Mat R(2, 2);
    for (size_t i = 0; i < 2; ++i)
      for (size_t j = 0; j < 2; ++j)
        R(i, j) = Scalar(mpq_class(static_cast<long>(testing::mix64(iter * 4 + i * 2 + j) % 13) - 6, 7));
    REQUIRE(lattice_from_matrix(R, dd).det == Scalar(1));
  }
}

TEST_CASE("dual basis") {
  Dims d11(1, 1);
  LatticeBasis id(d11, Mat::identity(2));
  REQUIRE(dual_basis(id).columns == Mat::identity(2));
  Mat diag(2, 2);
  diag(0, 0) = Scalar(2);
  diag(1, 1) = Scalar::rational(1, 2);
  LatticeBasis b(d11, diag);
  Mat dual = dual_basis(b).columns;
  REQUIRE(dual(0, 0) == Scalar::rational(1, 2));
  REQUIRE(dual(1, 1) == Scalar(2));
  // dual of dual is the original, exactly, and x_A dual has the block shape
  Mat A(1, 1);
  A(0, 0) = Scalar::sqrt_of_ui(2);
  LatticeBasis xa = lattice_from_matrix(A, d11);
  REQUIRE(dual_basis(dual_basis(xa)).columns == xa.columns);
  Mat xd = dual_basis(xa).columns;
  REQUIRE(xd(0, 0) == Scalar(1));
  REQUIRE(xd(1, 0) == -Scalar::sqrt_of_ui(2));
  REQUIRE(xd(1, 1) == Scalar(1));
  REQUIRE(xd(0, 1) == Scalar(0));
}

TEST_CASE("grid canonicalization and equality modulo the lattice") {
  Dims d11(1, 1);
  LatticeBasis id(d11, Mat::identity(2));
  Grid y(id, {Scalar::rational(7, 2), Scalar::rational(-5, 4)});
  Grid c = y.canonical();
  // shifts reduced into [-1/2, 1/2] with ties toward zero
  REQUIRE(c.shift[0].abs() <= Scalar::rational(1, 2));
  REQUIRE(c.shift[1].abs() <= Scalar::rational(1, 2));
  REQUIRE(y.same_grid(c));
  Grid z(id, {Scalar::rational(1, 2), Scalar::rational(3, 4)});
  REQUIRE_FALSE(y.same_grid(z));
  // two grids whose shifts differ by a lattice vector are equal
  Grid z2(id, {Scalar::rational(3, 2), Scalar::rational(7, 4)});
  REQUIRE(z.same_grid(z2));
  REQUIRE(z.canonical().shift[0] == z2.canonical().shift[0]);
  // tie rounding: shift 1/2 reduces toward zero (stays 1/2, not -1/2)
  Grid t(id, {Scalar::rational(1, 2), Scalar(0)});
  REQUIRE(t.canonical().shift[0] == Scalar::rational(1, 2));
}

TEST_CASE("multi-index enumeration") {
  auto all = all_multi_indices(4, 2);
  REQUIRE(all.size() == 6);
  REQUIRE(all.front().indices == std::vector<int>{1, 2});
  REQUIRE(all.back().indices == std::vector<int>{3, 4});
  REQUIRE_THROWS_AS(MultiIndex({2, 2}, 3), scalar_error);
  REQUIRE_THROWS_AS(MultiIndex({0}, 3), scalar_error);
}
